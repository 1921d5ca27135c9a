"""Incremental entanglement detection from partial MUB data.

Each round infers a guess state consistent with the data, builds the optimal
trace-one decomposable witness for it, and bounds the witness expectation
from above over every state the data still allows.  A negative bound means
all consistent states, the true one included, are entangled.
"""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .measure import MeasurementRecord
from .mub import MubFamily
from .qlin import (
    DIM,
    DensityMatrix,
    PureState,
    eig_hermitian,
    fidelity_pure,
    hermitize,
    lambda_min,
    partial_transpose,
    traceless_hermitian_basis,
)
from .sdp import Block, Constraint, LmiBlock, LmiProblem, SdpError, SdpProblem, solve, solve_lmi

log = logging.getLogger(__name__)

EXACT_SLACK = 1e-9
STAGE2_MARGIN = 1e-9
# every density matrix has ||sigma - I/9||_F^2 = tr(sigma^2) - 1/9 <= 8/9
_Y_RADIUS = float(np.sqrt(1.0 - 1.0 / 9.0))
# largest accepted distance between the feasible value and the rigorous bound
CERT_GAP = 1e-6
PPT_TOL = 1e-9
DETECTION_TOL = 1e-7

_EYE = np.eye(DIM, dtype=complex)
_CPLX = Block(DIM, "complex")


class CertificationInfeasible(RuntimeError):
    """No density matrix matches the data within the requested slack."""


def _require(sol, what: str):
    if sol.status != "optimal":
        raise SdpError(f"{what}: solver status {sol.status}")
    return sol


def _projectors(records: Sequence[MeasurementRecord], mubs: MubFamily) -> list[np.ndarray]:
    return [mubs.projector(r.basis_index, r.vector_index) for r in records]


def data_residual(sigma: np.ndarray, records: Sequence[MeasurementRecord], mubs: MubFamily) -> float:
    """max_k |tr(sigma Pi_k) - p_k|."""
    if not records:
        return 0.0
    vals = [
        np.real(np.vdot(v, sigma @ v))
        for v in (mubs.vector(r.basis_index, r.vector_index) for r in records)
    ]
    return float(np.max(np.abs(np.asarray(vals) - [r.p_hat for r in records])))


def _to_density(m: np.ndarray) -> DensityMatrix:
    m = hermitize(m)
    w, v = np.linalg.eigh(m)
    if w[0] < 0:
        m = (v * np.clip(w, 0.0, None)) @ np.conj(v).T
    return DensityMatrix.from_matrix(m)


# sigma(y) = I/9 + sum_a y_a B_a keeps the trace fixed without an equality row.
_BASIS = traceless_hermitian_basis(DIM)
_NPAR = len(_BASIS)


def _sigma(y: np.ndarray) -> np.ndarray:
    return _EYE / DIM + np.tensordot(y[:_NPAR], _BASIS, axes=(0, 0))


def _data_rows(records: Sequence[MeasurementRecord], mubs: MubFamily) -> tuple[np.ndarray, np.ndarray]:
    """(g, p) with tr(sigma(y) Pi_k) = 1/9 + g[k] . y."""
    vecs = np.array([mubs.vector(r.basis_index, r.vector_index) for r in records])
    g = np.real(np.einsum("ki,aij,kj->ka", np.conj(vecs), _BASIS, vecs))
    return g, np.array([r.p_hat for r in records])


def _slab(g: np.ndarray, p: np.ndarray, width, extra: np.ndarray | None = None):
    """Scalar rows for |1/9 + g y - p| <= width, optionally with a width column."""
    g0 = np.concatenate([p - 1.0 / DIM, 1.0 / DIM - p])
    rows = np.vstack([-g, g])
    if extra is not None:
        rows = np.hstack([rows, np.concatenate([extra, extra])[:, None]])
    else:
        g0 = g0 + width
    return g0, rows


@dataclass(frozen=True)
class GuessState:
    rho_tilde: DensityMatrix
    residual: float
    records_used: int


def estimate_guess_state(
    records: Sequence[MeasurementRecord], mubs: MubFamily, allow_empty: bool = False
) -> GuessState:
    """Most mixed state (largest lambda_min) among best data fits.

    Stage 1 finds the smallest uniform deviation t* achievable by any density
    matrix; stage 2 maximizes lambda_min(sigma) with deviations capped at
    t* + 1e-9.
    """
    if not records:
        if not allow_empty:
            raise ValueError("estimate_guess_state needs at least one record")
        return GuessState(DensityMatrix.maximally_mixed(), 0.0, 0)
    g, p = _data_rows(records, mubs)
    zero = np.zeros((1, DIM, DIM))

    # stage 1: min t  s.t. |tr(sigma Pi_k) - p_k| <= t, sigma >= 0
    c = np.zeros(_NPAR + 1)
    c[-1] = -1.0
    g0, rows = _slab(g, p, None, extra=np.ones(len(p)))
    lmi = LmiBlock(_EYE / DIM, np.concatenate([_BASIS, zero]))
    s1 = _require(solve_lmi(LmiProblem(c, [lmi], g0, rows)), "guess stage 1")
    t_star = data_residual(_to_density(_sigma(s1.y)).mat, records, mubs)

    # stage 2: max s  s.t. sigma - s I >= 0 within the t* + margin slab
    tau = t_star + STAGE2_MARGIN
    g0, rows = _slab(g, p, tau)
    rows = np.hstack([rows, np.zeros((len(rows), 1))])
    lmi = LmiBlock(_EYE / DIM, np.concatenate([_BASIS, -_EYE[None]]))
    s2 = _require(solve_lmi(LmiProblem(c * -1.0, [lmi], g0, rows)), "guess stage 2")
    return GuessState(_to_density(_sigma(s2.y)), t_star, len(records))


def _state_hash(m: np.ndarray) -> str:
    return hashlib.sha256(np.round(np.asarray(m, dtype=complex), 12).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class Witness:
    """Trace-one decomposable witness W = P + Q^Gamma."""

    w: np.ndarray
    p: np.ndarray
    q: np.ndarray
    value_on_guess: float
    source_state_hash: str

    def expectation(self, rho: DensityMatrix | np.ndarray) -> float:
        m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
        return float(np.real(np.trace(self.w @ m)))

    def decomposition_residual(self) -> float:
        return float(np.max(np.abs(self.w - self.p - partial_transpose(self.q))))


@dataclass(frozen=True)
class WitnessSdpResult:
    optimum: float
    p: np.ndarray
    q: np.ndarray


def solve_witness_sdp(rho: DensityMatrix | np.ndarray) -> WitnessSdpResult:
    """min tr(P rho) + tr(Q rho^Gamma) over P, Q >= 0 with tr P + tr Q = 1."""
    m = rho.mat if isinstance(rho, DensityMatrix) else hermitize(rho)
    prob = SdpProblem(
        [_CPLX, _CPLX],
        [m, partial_transpose(m)],
        [Constraint([_EYE, _EYE], 1.0, "=")],
        "min",
    )
    sol = _require(solve(prob), "witness SDP")
    return WitnessSdpResult(sol.objective_value, sol.primal[0], sol.primal[1])


def build_witness(guess: GuessState | DensityMatrix) -> Witness | None:
    """Optimal witness for the guess state, or ``None`` when the guess is PPT.

    Optimal solutions are rank one on the lowest eigenvector of rho or
    rho^Gamma; the SDP picks the side and the eigenvector (lowest index,
    first nonzero component real positive) fixes ties deterministically.
    """
    rho = guess.rho_tilde if isinstance(guess, GuessState) else guess
    res = solve_witness_sdp(rho)
    if res.optimum >= -PPT_TOL:
        return None
    use_q = np.real(np.trace(res.q)) >= np.real(np.trace(res.p))
    target = partial_transpose(rho.mat) if use_q else rho.mat
    _, vecs = eig_hermitian(target)
    v = vecs[:, 0]
    rank_one = np.outer(v, np.conj(v))
    zero = np.zeros((DIM, DIM), dtype=complex)
    p, q = (zero, rank_one) if use_q else (rank_one, zero)
    w = p + partial_transpose(q)
    value = float(np.real(np.trace(w @ rho.mat)))
    if abs(value - res.optimum) > 1e-6:
        log.warning("rank-one witness value %.3e differs from SDP optimum %.3e", value, res.optimum)
    return Witness(w, p, q, value, _state_hash(rho.mat))


@dataclass(frozen=True)
class Certification:
    value: float
    status: str  # "certified" | "infeasible"
    slack: float
    primal_state: np.ndarray | None = None

    @property
    def detected(self) -> bool:
        return self.status == "certified" and self.value < -DETECTION_TOL


def certify_bound(
    w: Witness, records: Sequence[MeasurementRecord], mubs: MubFamily, slack: float
) -> Certification:
    """Largest tr(W sigma) over density matrices within ``slack`` of every record."""
    if not records:
        raise ValueError("certify_bound needs at least one record")
    g, p = _data_rows(records, mubs)
    g0, rows = _slab(g, p, slack)
    c = np.real(np.einsum("ij,aji->a", w.w, _BASIS))
    offset = float(np.real(np.trace(w.w))) / DIM
    sol = solve_lmi(LmiProblem(c, [LmiBlock(_EYE / DIM, _BASIS)], g0, rows))
    if sol.status == "infeasible":
        return Certification(float("nan"), "infeasible", slack)
    # Weak duality with the multipliers, widened by their residual, bounds
    # every consistent state from above even when the last digits stall.
    upper = sol.upper_bound + _Y_RADIUS * sol.multiplier_residual
    usable = sol.optimal or (
        sol.status == "max-iterations"
        and sol.y_margin >= -CERT_GAP
        and upper - sol.objective_value <= CERT_GAP
    )
    if not usable:
        raise SdpError(f"certify bound: solver status {sol.status}")
    value = offset + max(sol.objective_value, upper)
    return Certification(float(value), "certified", slack, _sigma(sol.y))


def noise_slack(records: Sequence[MeasurementRecord]) -> float:
    """Three binomial standard deviations, maximized over sampled records."""
    s = 0.0
    for r in records:
        if r.shots is not None:
            s = max(s, 3.0 * np.sqrt(r.p_hat * (1.0 - r.p_hat) / r.shots))
    return float(s)


def auto_slack(records: Sequence[MeasurementRecord], t_star: float) -> float:
    if all(r.exact for r in records):
        return max(EXACT_SLACK, t_star + STAGE2_MARGIN)
    return max(noise_slack(records), t_star + STAGE2_MARGIN)


@dataclass
class TraceEntry:
    k: int
    value: float | None
    lambda_min_guess: float
    residual: float
    witness_refreshed: bool
    slack: float = 0.0
    status: str = "ok"
    guess: DensityMatrix | None = field(default=None, repr=False)
    witness: Witness | None = field(default=None, repr=False)
    error: str | None = None

    @property
    def detected(self) -> bool:
        return self.value is not None and self.value < -DETECTION_TOL

    def row(self) -> dict:
        return {
            "k": self.k,
            "V": self.value,
            "lambda_min_guess": self.lambda_min_guess,
            "residual": self.residual,
            "witness_refreshed": self.witness_refreshed,
            "slack": self.slack,
            "status": self.status,
        }


@dataclass
class DetectionTrace:
    entries: list[TraceEntry] = field(default_factory=list)
    reference_value: float | None = None

    def first_detection(self) -> int | None:
        for e in self.entries:
            if e.detected:
                return e.k
        return None

    @property
    def final(self) -> TraceEntry:
        return self.entries[-1]

    def guess_fidelities(self, target: PureState) -> list[tuple[int, float]]:
        return [(e.k, fidelity_pure(target, e.guess)) for e in self.entries if e.guess is not None]


def _batches(records: Sequence[MeasurementRecord], batch: str) -> list[int]:
    """Record counts after which a round runs."""
    n = len(records)
    if batch == "projector":
        return list(range(1, n + 1))
    if batch != "basis":
        raise ValueError(f"batch must be 'basis' or 'projector', got {batch!r}")
    ends = [k for k in range(1, n) if records[k].basis_index != records[k - 1].basis_index]
    return ends + [n]


def run_detection(
    records: Sequence[MeasurementRecord],
    mubs: MubFamily,
    batch: str = "basis",
    slack: str | float = "auto",
) -> DetectionTrace:
    """Re-estimate, re-witness and re-certify after each batch of records."""
    if not records:
        raise ValueError("run_detection needs at least one record")
    trace = DetectionTrace()
    witness: Witness | None = None
    for k in _batches(records, batch):
        data = list(records[:k])
        try:
            guess = estimate_guess_state(data, mubs)
            lam = lambda_min(partial_transpose(guess.rho_tilde))
            fresh = build_witness(guess)
            refreshed = fresh is not None
            if refreshed:
                witness = fresh
            eps = auto_slack(data, guess.residual) if slack == "auto" else float(slack)
            if witness is None:
                trace.entries.append(
                    TraceEntry(k, None, lam, guess.residual, False, eps, "no witness yet", guess.rho_tilde)
                )
                continue
            cert = certify_bound(witness, data, mubs, eps)
            if cert.status == "infeasible":
                trace.entries.append(
                    TraceEntry(
                        k, None, lam, guess.residual, refreshed, eps, "infeasible",
                        guess.rho_tilde, witness,
                        error=f"no state within slack {eps:.3e} of the data; increase the slack",
                    )
                )
                continue
            trace.entries.append(
                TraceEntry(k, cert.value, lam, guess.residual, refreshed, eps, "ok", guess.rho_tilde, witness)
            )
        except (SdpError, ValueError, np.linalg.LinAlgError) as exc:
            log.warning("round k=%d failed: %s", k, exc)
            trace.entries.append(
                TraceEntry(k, None, float("nan"), float("nan"), False, 0.0, "error", error=f"round k={k}: {exc}")
            )
    last = trace.entries[-1]
    if last.guess is not None:
        trace.reference_value = lambda_min(partial_transpose(last.guess))
    return trace
