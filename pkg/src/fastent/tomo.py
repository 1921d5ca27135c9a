"""Full-data state reconstruction and I-concurrence.

Linear inversion needs one probability per MUB projector. Forced purity fits
the closest pure state to whatever records are given.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .measure import MeasurementRecord
from .mub import MubFamily
from .qlin import (
    DIM,
    DensityMatrix,
    PureState,
    fidelity_pure,
    fix_phase,
    hermitize,
    lambda_min,
    partial_trace,
)

PURE_FLOOR = 17  # real parameters of a 9-dim pure state, minus one
PURITY_TOL = 1e-9
DEFAULT_RESTARTS = 16


class RecordSetError(ValueError):
    """The record set does not cover every projector exactly once."""


class UnderdeterminedWarning(UserWarning):
    pass


class MixedStateError(ValueError):
    """I-concurrence from marginal purity is only valid for pure states."""


@dataclass(frozen=True)
class LinearEstimate:
    matrix: np.ndarray
    lambda_min: float

    @property
    def psd(self) -> bool:
        return self.lambda_min >= -1e-10


def linear_inversion(records: Sequence[MeasurementRecord], mubs: MubFamily) -> LinearEstimate:
    """rho = sum_{alpha, m} p_m^alpha Pi_m^alpha - I over all 90 projectors."""
    counts = Counter(r.key for r in records)
    expected = {(a, m) for a in range(1, mubs.n_bases + 1) for m in range(1, DIM + 1)}
    missing = sorted(expected - counts.keys())
    dup = sorted(k for k, c in counts.items() if c > 1)
    extra = sorted(counts.keys() - expected)
    if missing or dup or extra:
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if dup:
            parts.append(f"duplicated {dup}")
        if extra:
            parts.append(f"unknown {extra}")
        raise RecordSetError("linear inversion needs each (alpha, m) exactly once: " + "; ".join(parts))
    vecs = np.array([mubs.vector(*r.key) for r in records])
    p = np.array([r.p_hat for r in records])
    rho = np.einsum("k,ki,kj->ij", p, vecs, np.conj(vecs)) - np.eye(DIM)
    rho = hermitize(rho)
    return LinearEstimate(rho, lambda_min(rho))


def _cost_and_grad(x: np.ndarray, U: np.ndarray, p: np.ndarray) -> tuple[float, np.ndarray]:
    # U rows are conj(u_k); psi = v / |v|
    v = x[:DIM] + 1j * x[DIM:]
    n = float(np.real(np.vdot(v, v)))
    a = U @ v
    q = np.abs(a) ** 2 / n
    r = q - p
    cost = float(r @ r)
    # d cost / d conj(v)
    g = 2.0 * (np.conj(U).T @ (r * a) / n - (r @ q) * v / n)
    return cost, np.concatenate([2.0 * g.real, 2.0 * g.imag])


def _backprojection_start(U: np.ndarray, p: np.ndarray) -> np.ndarray:
    m = np.einsum("k,ki,kj->ij", p, np.conj(U), U)
    _, vecs = np.linalg.eigh(hermitize(m))
    return vecs[:, -1]


def forced_purity(
    records: Sequence[MeasurementRecord],
    mubs: MubFamily,
    restarts: int = DEFAULT_RESTARTS,
    seed: int = 0,
) -> tuple[PureState, float]:
    """Pure state minimizing sum_k (|<psi_k|psi>|^2 - p_k)^2, best of ``restarts`` local fits.

    The first start is the top eigenvector of sum_k p_k Pi_k; the rest are
    Gaussian random vectors drawn from ``seed``.
    """
    if not records:
        raise ValueError("forced purity needs at least one record")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    if len(records) < PURE_FLOOR:
        warnings.warn(
            f"{len(records)} records cannot pin down a pure state ({PURE_FLOOR} needed)",
            UnderdeterminedWarning,
            stacklevel=2,
        )
    U = np.conj(np.array([mubs.vector(*r.key) for r in records]))
    p = np.array([r.p_hat for r in records])
    rng = np.random.default_rng(seed)
    starts = [_backprojection_start(U, p)]
    starts += [rng.normal(size=DIM) + 1j * rng.normal(size=DIM) for _ in range(restarts - 1)]

    fits = []
    for v0 in starts:
        x0 = np.concatenate([v0.real, v0.imag])
        res = minimize(
            _cost_and_grad, x0, args=(U, p), jac=True, method="L-BFGS-B",
            options={"maxiter": 2000, "ftol": 1e-16, "gtol": 1e-12},
        )
        v = res.x[:DIM] + 1j * res.x[DIM:]
        psi = fix_phase(v / np.linalg.norm(v))
        cost, _ = _cost_and_grad(np.concatenate([psi.real, psi.imag]), U, p)
        fits.append((cost, psi))
    best_cost = min(c for c, _ in fits)
    # near-ties resolved lexicographically on the phase-fixed amplitudes
    tied = [psi for c, psi in fits if c <= best_cost + 1e-14]
    psi = min(tied, key=lambda a: tuple(np.round(np.concatenate([a.real, a.imag]), 10)))
    return PureState.normalized(psi), best_cost


def i_concurrence(state: PureState | DensityMatrix) -> float:
    """C^2 = 2 (1 - tr rho_A^2), only for pure states."""
    if isinstance(state, PureState):
        rho = state.projector()
    else:
        rho = state.mat
        purity = float(np.real(np.trace(rho @ rho)))
        if purity < 1.0 - PURITY_TOL:
            raise MixedStateError(
                f"state has purity {purity:.6f}; the marginal-purity concurrence holds for pure states only"
            )
    ra = partial_trace(rho, "A")
    return float(2.0 * (1.0 - np.real(np.trace(ra @ ra))))


@dataclass(frozen=True)
class TomographyResult:
    rho_linear: np.ndarray | None
    linear_lambda_min: float | None
    rho_pure: PureState | None
    fit_cost: float | None
    fidelity_to_target: float | None = None

    @property
    def linear_psd(self) -> bool | None:
        return None if self.linear_lambda_min is None else self.linear_lambda_min >= -1e-10


def reconstruct(
    records: Sequence[MeasurementRecord],
    mubs: MubFamily,
    mode: str = "both",
    restarts: int = DEFAULT_RESTARTS,
    target: PureState | None = None,
    seed: int = 0,
) -> TomographyResult:
    if mode not in ("linear", "forced-purity", "both"):
        raise ValueError(f"mode must be linear, forced-purity or both, got {mode!r}")
    lin = linear_inversion(records, mubs) if mode in ("linear", "both") else None
    pure, cost = (None, None)
    if mode in ("forced-purity", "both"):
        pure, cost = forced_purity(records, mubs, restarts, seed)
    fid = None
    if target is not None:
        if pure is not None:
            fid = fidelity_pure(target, pure.projector())
        elif lin is not None:
            fid = fidelity_pure(target, lin.matrix)
    return TomographyResult(
        None if lin is None else lin.matrix,
        None if lin is None else lin.lambda_min,
        pure,
        cost,
        fid,
    )
