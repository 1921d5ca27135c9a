"""Noisy detection runs: certified V against the true witness value.

For every round where the true state lies inside the slack, the margin
V - tr(W rho) must be nonnegative. Separable runs must never certify.

    python3 scripts/reliability_sweep.py --runs 40 --shots 50000
"""

import argparse
from dataclasses import dataclass

import numpy as np

from fastent.measure import MeasurementPlan, measure
from fastent.mub import build_mub_family
from fastent.qlin import PureState
from fastent.witness import data_residual, run_detection


@dataclass
class Config:
    runs: int = 20
    shots: int = 50_000
    seed: int = 0


def _state(rng, entangled: bool):
    if entangled:
        return PureState.normalized(rng.normal(size=9) + 1j * rng.normal(size=9)).density()
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    return PureState.normalized(np.kron(a, b)).density()


def main(cfg: Config) -> None:
    mubs = build_mub_family()
    margins, infeasible_truth, false_pos = [], 0, 0
    for i in range(cfg.runs):
        rng = np.random.default_rng([cfg.seed, i])
        entangled = i % 2 == 0
        rho = _state(rng, entangled)
        order = tuple(int(a) for a in rng.permutation(10) + 1)
        recs = measure(rho, MeasurementPlan(order, cfg.shots), mubs, seed=cfg.seed + i)
        trace = run_detection(recs, mubs)
        if not entangled:
            false_pos += sum(e.detected for e in trace.entries)
        for e in trace.entries:
            if e.value is None:
                continue
            if data_residual(rho.mat, recs[: e.k], mubs) <= e.slack:
                margins.append(e.value - e.witness.expectation(rho))
            else:
                infeasible_truth += 1
        print(f"run {i:3d} {'ent' if entangled else 'sep'} first k={trace.first_detection()}")
    m = np.array(margins)
    print(f"rounds checked {len(m)}, truth outside slack {infeasible_truth}")
    print(f"margin min {m.min():.3e}  median {np.median(m):.3e}  violations {(m < -1e-6).sum()}")
    print(f"separable detections {false_pos}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--runs", type=int, default=Config.runs)
    ap.add_argument("--shots", type=int, default=Config.shots)
    ap.add_argument("--seed", type=int, default=Config.seed)
    main(Config(**vars(ap.parse_args())))
