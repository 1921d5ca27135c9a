"""Projection probabilities onto MUB vectors, exact or shot-noise sampled."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mub import MubFamily, N_BASES
from .qlin import DIM, DensityMatrix

DEFAULT_SHOTS = 50_000
DEFAULT_ORDER = (10, 1, 2, 3, 4, 5, 6, 7, 8, 9)


@dataclass(frozen=True)
class MeasurementPlan:
    """Ordered basis indices; each contributes its 9 projectors in vector order.

    ``shots=None`` means exact probabilities.
    """

    order: tuple[int, ...] = DEFAULT_ORDER
    shots: int | None = DEFAULT_SHOTS

    def __post_init__(self) -> None:
        order = tuple(int(a) for a in self.order)
        if len(set(order)) != len(order):
            raise ValueError(f"basis indices must be distinct: {order}")
        if any(not 1 <= a <= N_BASES for a in order):
            raise ValueError(f"basis indices must lie in 1..{N_BASES}: {order}")
        if self.shots is not None and int(self.shots) <= 0:
            raise ValueError("shots_per_projector must be positive")
        object.__setattr__(self, "order", order)

    def settings(self) -> list[tuple[int, int]]:
        return [(a, m) for a in self.order for m in range(1, DIM + 1)]


@dataclass(frozen=True)
class MeasurementRecord:
    basis_index: int
    vector_index: int
    p_hat: float
    shots: int | None = None
    raw_count: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_hat <= 1.0:
            raise ValueError(f"p_hat {self.p_hat} outside [0, 1]")
        if self.shots is not None and self.raw_count is None:
            raise ValueError("sampled records need a raw count")

    @property
    def key(self) -> tuple[int, int]:
        return (self.basis_index, self.vector_index)

    @property
    def exact(self) -> bool:
        return self.shots is None

    def to_json(self) -> dict:
        d = {
            "basis_index": self.basis_index,
            "vector_index": self.vector_index,
            "p_hat": self.p_hat,
            "shots": "exact" if self.shots is None else self.shots,
        }
        if self.raw_count is not None:
            d["raw_count"] = self.raw_count
        return d

    @classmethod
    def from_json(cls, d: dict) -> "MeasurementRecord":
        shots = d.get("shots", "exact")
        return cls(
            int(d["basis_index"]),
            int(d["vector_index"]),
            float(d["p_hat"]),
            None if shots == "exact" else int(shots),
            None if d.get("raw_count") is None else int(d["raw_count"]),
        )


def _probability(rho: np.ndarray, v: np.ndarray) -> float:
    p = float(np.real(np.vdot(v, rho @ v)))
    return min(max(p, 0.0), 1.0)


def exact_probabilities(
    rho: DensityMatrix, plan: MeasurementPlan, mubs: MubFamily
) -> list[MeasurementRecord]:
    return [
        MeasurementRecord(a, m, _probability(rho.mat, mubs.vector(a, m)))
        for a, m in plan.settings()
    ]


def record_rng(seed: int, alpha: int, m: int) -> np.random.Generator:
    """PCG64 stream keyed on (seed, alpha, m), independent of evaluation order."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, alpha, m])))


def sample_counts(
    rho: DensityMatrix, plan: MeasurementPlan, mubs: MubFamily, seed: int
) -> list[MeasurementRecord]:
    if plan.shots is None:
        raise ValueError("sample_counts needs a finite shots_per_projector")
    n = int(plan.shots)
    out = []
    for a, m in plan.settings():
        p = _probability(rho.mat, mubs.vector(a, m))
        count = int(record_rng(seed, a, m).binomial(n, p))
        out.append(MeasurementRecord(a, m, count / n, n, count))
    return out


def measure(
    rho: DensityMatrix, plan: MeasurementPlan, mubs: MubFamily, seed: int = 0
) -> list[MeasurementRecord]:
    if plan.shots is None:
        return exact_probabilities(rho, plan, mubs)
    return sample_counts(rho, plan, mubs, seed)
