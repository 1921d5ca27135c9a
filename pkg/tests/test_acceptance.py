"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import time

import numpy as np
import pytest

import conftest
from fastent.cli import summarize_trace, trace_to_json
from fastent.measure import MeasurementPlan, exact_probabilities, measure
from fastent.mub import build_mub_family, verify_mub
from fastent.qlin import DensityMatrix, PureState, fidelity_pure, ket, lambda_min, partial_transpose
from fastent.sdp import lambda_min_sdp
from fastent.statesim import PRESETS
from fastent.tomo import forced_purity, i_concurrence, linear_inversion
from fastent.witness import data_residual, run_detection, solve_witness_sdp

EXACT = MeasurementPlan(shots=None)


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def random_pure(rng):
    return PureState.normalized(rng.normal(size=9) + 1j * rng.normal(size=9))


def random_mixed(rng):
    rank = int(rng.integers(2, 10))
    g = rng.normal(size=(9, rank)) + 1j * rng.normal(size=(9, rank))
    return DensityMatrix.from_matrix(g @ g.conj().T)


def random_product(rng):
    a = rng.normal(size=3) + 1j * rng.normal(size=3)
    b = rng.normal(size=3) + 1j * rng.normal(size=3)
    return PureState.normalized(np.kron(a, b))


def random_separable_mixture(rng):
    n = int(rng.integers(2, 5))
    w = rng.dirichlet(np.ones(n))
    return DensityMatrix.from_matrix(sum(wi * random_product(rng).projector() for wi in w))


def random_order(rng):
    return tuple(int(a) for a in rng.permutation(10) + 1)


def test_criterion_1_mub_validity():
    t0 = time.perf_counter()
    build_mub_family.cache_clear()
    report = verify_mub(build_mub_family())
    dt = time.perf_counter() - t0
    ok = report.passed and dt < 1.0
    record(1, ok, f"orth {report.orthonormality_deviation:.2e}, unbiased {report.unbiasedness_deviation:.2e}, {dt:.3f} s")


def test_criterion_2_tomographic_completeness():
    rng = np.random.default_rng(2)
    mubs = build_mub_family()
    t0 = time.perf_counter()
    worst = 0.0
    states = [random_pure(rng).density() for _ in range(100)] + [random_mixed(rng) for _ in range(100)]
    for rho in states:
        est = linear_inversion(exact_probabilities(rho, EXACT, mubs), mubs)
        worst = max(worst, float(np.max(np.abs(est.matrix - rho.mat))))
    dt = time.perf_counter() - t0
    record(2, worst <= 1e-9 and dt < 10, f"max entry error {worst:.2e} over 200 states, {dt:.2f} s")


def test_criterion_3_concurrence_endpoints():
    rng = np.random.default_rng(3)
    prod = max(abs(i_concurrence(random_product(rng))) for _ in range(100))
    phi = PureState.normalized(ket(0, 0) + ket(1, 1) + ket(2, 2))
    top = i_concurrence(phi)
    presets = [i_concurrence(PRESETS[k].state()) for k in (1, 2, 3)]
    targets = [1.20, 0.45, 0.27]
    ok = prod <= 1e-9 and abs(top - 4 / 3) <= 1e-9 and all(abs(c - t) <= 0.05 for c, t in zip(presets, targets))
    record(3, ok, f"products {prod:.1e}, max {top:.12f}, presets " + "/".join(f"{c:.3f}" for c in presets))


def test_criterion_4_sdp_oracles():
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    lam_err = 0.0
    for k in range(50):
        n = 2 + k % 17
        h = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        h = (h + h.conj().T) / 2
        lam_err = max(lam_err, abs(lambda_min_sdp(h) - lambda_min(h)))
    wit_err = 0.0
    for _ in range(20):
        rho = random_mixed(rng) if rng.random() < 0.5 else random_pure(rng).density()
        opt = solve_witness_sdp(rho).optimum
        wit_err = max(wit_err, abs(opt - min(lambda_min(rho.mat), lambda_min(partial_transpose(rho)))))
    dt = time.perf_counter() - t0
    ok = lam_err <= 1e-7 and wit_err <= 1e-6 and dt < 30
    record(4, ok, f"lambda_min err {lam_err:.1e}, witness err {wit_err:.1e}, {dt:.2f} s")


def test_criterion_5_full_data_certification():
    rng = np.random.default_rng(5)
    mubs = build_mub_family()
    t0 = time.perf_counter()
    v_err, fid_gap = 0.0, 0.0
    for _ in range(20):
        psi = random_pure(rng)
        rho = psi.density()
        trace = run_detection(exact_probabilities(rho, EXACT, mubs), mubs)
        last = trace.final
        v = last.value if last.value is not None else np.inf
        v_err = max(v_err, abs(v - lambda_min(partial_transpose(rho))))
        fid_gap = max(fid_gap, 1 - fidelity_pure(psi, last.guess))
    dt = time.perf_counter() - t0
    ok = v_err <= 1e-6 and fid_gap <= 1e-6 and dt < 120
    record(5, ok, f"|V90 - lambda_min| {v_err:.1e}, 1 - fidelity {fid_gap:.1e}, {dt:.1f} s")


def test_criterion_6_fast_detection():
    mubs = build_mub_family()
    firsts = []
    for k in (1, 2, 3):
        trace = run_detection(exact_probabilities(PRESETS[k].state().density(), EXACT, mubs), mubs)
        firsts.append(trace.first_detection())
    ok = firsts[0] == 18 and None not in firsts and firsts[0] <= firsts[1] <= firsts[2]
    record(6, ok, f"first detection k for presets 1/2/3: {firsts}")


@pytest.mark.slow
def test_criterion_7_reliability():
    mubs = build_mub_family()
    t0 = time.perf_counter()
    checked = violations = false_pos = errors = 0
    worst = np.inf
    for run in range(100):
        rng = np.random.default_rng(7000 + run)
        if run < 50:
            rho = PRESETS[run % 3 + 1].state().density() if run % 10 == 0 else random_pure(rng).density()
        else:
            rho = random_product(rng).density() if run % 2 else random_separable_mixture(rng)
        plan = MeasurementPlan(order=random_order(rng), shots=50_000)
        recs = measure(rho, plan, mubs, seed=run)
        trace = run_detection(recs, mubs)
        errors += sum(e.status == "error" for e in trace.entries)
        if run >= 50:
            false_pos += sum(e.detected for e in trace.entries)
        for e in trace.entries:
            if e.value is None:
                continue
            if data_residual(rho.mat, recs[: e.k], mubs) <= e.slack:
                margin = e.value - e.witness.expectation(rho)
                worst = min(worst, margin)
                checked += 1
                violations += margin < -1e-6
    dt = time.perf_counter() - t0
    ok = violations == 0 and false_pos == 0 and errors == 0 and checked > 0 and dt < 600
    record(
        7, ok,
        f"{checked} feasible rounds, worst V - tr(W rho) {worst:.2e}, {violations} violations, "
        f"{false_pos} separable detections, {errors} errors, {dt:.0f} s",
    )


def test_criterion_8_ordering_sensitivity():
    mubs = build_mub_family()
    rng = np.random.default_rng(8)
    rho = PRESETS[1].state().density()
    ref = lambda_min(partial_transpose(rho))
    firsts, worst = [], 0.0
    for i in range(10):
        order = random_order(rng)
        trace = run_detection(exact_probabilities(rho, MeasurementPlan(order=order, shots=None), mubs), mubs)
        summary = summarize_trace(f"perm{i}", trace_to_json(trace, {"order": list(order)}))
        firsts.append(summary.first_detection)
        final = summary.final_value if summary.final_value is not None else np.inf
        worst = max(worst, abs(final - ref))
    ok = worst <= 1e-6 and len(set(firsts)) > 1
    record(8, ok, f"max |V90 - lambda_min| {worst:.1e}, first detection k per permutation {firsts}")


def test_criterion_9_forced_purity_noise():
    mubs = build_mub_family()
    t0 = time.perf_counter()
    rates = []
    for k in (1, 2, 3):
        psi = PRESETS[k].state()
        good = 0
        for seed in range(100):
            recs = measure(psi.density(), MeasurementPlan(shots=50_000), mubs, seed=seed)
            fit, _ = forced_purity(recs, mubs, seed=seed)
            good += fidelity_pure(psi, fit.projector()) >= 0.98
        rates.append(good / 100)
    dt = time.perf_counter() - t0
    record(9, all(r >= 0.95 for r in rates), f"fraction with fidelity >= 0.98 per preset {rates}, {dt:.1f} s")
