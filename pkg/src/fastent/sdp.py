"""Dense primal-dual interior-point solver for small semidefinite programs.

Problems are stated over a list of matrix blocks (real symmetric or complex
Hermitian) with linear constraints of the form ``sum_k <A_k, X_k> (=, <=, >=) b``.
Internally everything is reduced to the standard pair

    min <C, X>  s.t.  A(X) = b, X >= 0
    max b'y     s.t.  C - A^T(y) = Z >= 0

where complex blocks of size n become real blocks of size 2n, and 1x1 blocks
together with inequality slacks form one non-negative orthant.  Iterates
follow the Nesterov-Todd search direction with Mehrotra's predictor-corrector.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import linalg as sla

log = logging.getLogger(__name__)

GAP_TOL = 1e-10
FEAS_TOL = 1e-10
MAX_ITER = 200
INFEAS_TOL = 1e-8

# Contract the caller relies on when status is "optimal".
CONTRACT_FEAS = 1e-7
CONTRACT_GAP = 1e-7
CONTRACT_PSD = 1e-8
# a stalled best iterate is still returned as optimal when it meets the contract
ACCEPT_TOL = 1e-7


class SdpError(RuntimeError):
    """The solver could not produce a usable answer."""


@dataclass(frozen=True)
class Block:
    dim: int
    field: str = "real"  # "real" | "complex"

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("block dimension must be positive")
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown block field {self.field!r}")


@dataclass
class Constraint:
    """``sum_k <coeffs[k], X_k> relation rhs``; ``None`` entries are zero blocks."""

    coeffs: list
    rhs: float
    relation: str = "="

    def __post_init__(self) -> None:
        if self.relation not in ("=", "<=", ">="):
            raise ValueError(f"unknown relation {self.relation!r}")


@dataclass
class SdpProblem:
    blocks: list[Block]
    objective: list
    constraints: list[Constraint] = field(default_factory=list)
    sense: str = "min"

    def __post_init__(self) -> None:
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        nb = len(self.blocks)
        if len(self.objective) != nb:
            raise ValueError("objective needs one coefficient matrix per block")
        for k, c in enumerate(self.constraints):
            if len(c.coeffs) != nb:
                raise ValueError(f"constraint {k} needs one coefficient matrix per block")
        for mats, where in [(self.objective, "objective")] + [
            (c.coeffs, f"constraint {k}") for k, c in enumerate(self.constraints)
        ]:
            for blk, m in zip(self.blocks, mats):
                if m is None:
                    continue
                m = np.asarray(m)
                if m.shape != (blk.dim, blk.dim):
                    raise ValueError(f"{where}: coefficient shape {m.shape} != block {blk.dim}")
                if blk.field == "real" and np.iscomplexobj(m) and np.any(m.imag != 0):
                    raise ValueError(f"{where}: complex coefficient on a real block")
                if np.max(np.abs(m - np.conj(m).T), initial=0.0) > 1e-12 * (1 + np.max(np.abs(m))):
                    raise ValueError(f"{where}: coefficient matrix is not symmetric/Hermitian")

    def to_json(self) -> dict:
        def enc(m):
            if m is None:
                return None
            m = np.asarray(m, dtype=complex)
            return {"re": m.real.tolist(), "im": m.imag.tolist()}

        return {
            "sense": self.sense,
            "blocks": [{"dim": b.dim, "field": b.field} for b in self.blocks],
            "objective": [enc(m) for m in self.objective],
            "constraints": [
                {"coeffs": [enc(m) for m in c.coeffs], "rhs": c.rhs, "relation": c.relation}
                for c in self.constraints
            ],
        }

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json()))


@dataclass
class SdpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded" | "max-iterations"
    objective_value: float
    primal: list[np.ndarray]
    dual: np.ndarray
    duality_gap: float
    primal_infeasibility: float
    dual_infeasibility: float
    iterations: int
    dual_objective: float = float("nan")
    certificate: float | None = None
    history: list[tuple[float, float, float, float]] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def embed(h: np.ndarray) -> np.ndarray:
    """Real symmetric 2n x 2n image [[Re H, -Im H], [Im H, Re H]] of a Hermitian H."""
    h = np.asarray(h, dtype=complex)
    re, im = h.real, h.imag
    return np.block([[re, -im], [im, re]])


def unembed(x: np.ndarray) -> np.ndarray:
    """Inverse of ``embed`` averaged over the redundant copies."""
    n = x.shape[0] // 2
    re = 0.5 * (x[:n, :n] + x[n:, n:])
    im = 0.5 * (x[n:, :n] - x[:n, n:])
    h = re + 1j * im
    return 0.5 * (h + np.conj(h).T)


class _Standard:
    """Standard-form data: stacked real coefficients per PSD block plus an LP part."""

    def __init__(self, C, A, c_lp, A_lp, b, sign=1.0):
        self.C = C
        self.A = A
        self.c_lp = c_lp
        self.A_lp = A_lp
        self.b = b
        self.m = len(b)
        self.sizes = [c.shape[0] for c in C]
        self.sign = sign

    def A_op(self, X: list[np.ndarray], x: np.ndarray) -> np.ndarray:
        out = self.A_lp @ x
        for A, Xk in zip(self.A, X):
            out = out + np.tensordot(A, Xk, axes=([1, 2], [0, 1]))
        return out

    def AT_op(self, y: np.ndarray) -> tuple[list[np.ndarray], np.ndarray]:
        return [np.tensordot(y, A, axes=(0, 0)) for A in self.A], self.A_lp.T @ y

    def c_norm(self) -> float:
        return float(np.sqrt(sum(np.sum(c**2) for c in self.C) + np.sum(self.c_lp**2)))


def _standard_from_problem(p: SdpProblem) -> tuple[_Standard, list[int], list[tuple[str, int]]]:
    sign = 1.0 if p.sense == "min" else -1.0
    m = len(p.constraints)
    sdp_src: list[int] = []  # user block index for each internal sdp block
    lp_src: list[tuple[str, int]] = []  # ("block", k) or ("slack", i)
    for k, blk in enumerate(p.blocks):
        if blk.dim == 1:
            lp_src.append(("block", k))
        else:
            sdp_src.append(k)
    for i, c in enumerate(p.constraints):
        if c.relation != "=":
            lp_src.append(("slack", i))

    def real_coeff(k: int, mat) -> np.ndarray:
        blk = p.blocks[k]
        n = blk.dim * (2 if blk.field == "complex" else 1)
        if mat is None:
            return np.zeros((n, n))
        mat = np.asarray(mat)
        if blk.field == "complex":
            return embed(mat)
        return np.real(mat).astype(float)

    C = [sign * real_coeff(k, p.objective[k]) for k in sdp_src]
    A = [
        np.stack([real_coeff(k, c.coeffs[k]) for c in p.constraints])
        if m
        else np.zeros((0,) + C[j].shape)
        for j, k in enumerate(sdp_src)
    ]
    nl = len(lp_src)
    c_lp = np.zeros(nl)
    A_lp = np.zeros((m, nl))
    for j, (kind, idx) in enumerate(lp_src):
        if kind == "block":
            o = p.objective[idx]
            c_lp[j] = sign * (0.0 if o is None else float(np.real(np.asarray(o)[0, 0])))
            for i, c in enumerate(p.constraints):
                a = c.coeffs[idx]
                A_lp[i, j] = 0.0 if a is None else float(np.real(np.asarray(a)[0, 0]))
        else:
            A_lp[idx, j] = 1.0 if p.constraints[idx].relation == "<=" else -1.0
    b = np.array([float(c.rhs) for c in p.constraints])
    return _Standard(C, A, c_lp, A_lp, b, sign), sdp_src, lp_src


def _inner(X: list[np.ndarray], Z: list[np.ndarray], x: np.ndarray, z: np.ndarray) -> float:
    return float(sum(np.sum(a * b) for a, b in zip(X, Z)) + x @ z)


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _factor(X: np.ndarray) -> np.ndarray:
    """Some F with X = F F^T."""
    try:
        return np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(X)
        return v * np.sqrt(np.clip(w, 1e-300, None))


def _nt_scaling(X: np.ndarray, Z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """G and lambda with G^T Z G = diag(lambda) = G^-1 X G^-T (Nesterov-Todd point W = G G^T)."""
    L = _factor(X)
    R = _factor(Z)
    _, s, vt = np.linalg.svd(R.T @ L)
    s = np.maximum(s, 1e-300)
    return (L @ vt.T) / np.sqrt(s), s


def _scaled_step(lam: np.ndarray, d: np.ndarray) -> float:
    """Largest alpha with diag(lam) + alpha d PSD."""
    r = 1.0 / np.sqrt(lam)
    lo = np.linalg.eigvalsh(_sym(d * np.outer(r, r)))[0]
    return np.inf if lo >= 0 else -1.0 / lo


def _max_step_lp(x: np.ndarray, dx: np.ndarray) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _solve_schur(M: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    M = _sym(M)
    scale = max(1.0, float(np.max(np.abs(np.diag(M))))) if M.size else 1.0
    for reg in (0.0, 1e-14, 1e-12, 1e-10):
        try:
            c = sla.cho_factor(M + reg * scale * np.eye(M.shape[0]), lower=True)
        except (np.linalg.LinAlgError, ValueError):
            continue
        d = sla.cho_solve(c, rhs)
        for _ in range(2):
            d = d + sla.cho_solve(c, rhs - M @ d)
        return d
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _lyap_rhs(lam: np.ndarray, target: float, corr: np.ndarray) -> np.ndarray:
    """H solving lam o H = target I - lam^2 - corr (o is the symmetrized product)."""
    rhs = -corr.copy()
    rhs[np.diag_indices_from(rhs)] += target - lam**2
    return 2.0 * rhs / (lam[:, None] + lam[None, :])


@dataclass
class _Raw:
    status: str
    X: list[np.ndarray]
    x: np.ndarray
    y: np.ndarray
    Z: list[np.ndarray]
    z: np.ndarray
    pobj: float
    dobj: float
    pinf: float
    dinf: float
    iterations: int
    certificate: float | None
    history: list[tuple[float, float, float, float]]


def _ipm(s: _Standard, max_iter: int) -> _Raw:
    m = s.m
    b = s.b
    nb = 1.0 + float(np.linalg.norm(b))
    nc = 1.0 + s.c_norm()
    nl = len(s.c_lp)
    ntot = sum(s.sizes) + nl
    if ntot == 0:
        raise ValueError("problem has no variables")

    # Starting point scaled to the data, in the spirit of SDPT3.
    X, Z = [], []
    for C, A, n in zip(s.C, s.A, s.sizes):
        anorm = np.sqrt(np.sum(A**2, axis=(1, 2))) if m else np.zeros(0)
        xi = max(10.0, np.sqrt(n), n * float(np.max((1 + np.abs(b)) / (1 + anorm), initial=0.0)))
        eta = max(10.0, np.sqrt(n), float(np.max(anorm, initial=0.0)), float(np.linalg.norm(C)))
        X.append(xi * np.eye(n))
        Z.append(eta * np.eye(n))
    if nl:
        anorm = np.linalg.norm(s.A_lp, axis=0)
        xi = max(10.0, np.sqrt(nl), nl * float(np.max((1 + np.abs(b)) / (1 + np.linalg.norm(s.A_lp, axis=1)), initial=0.0)))
        eta = max(10.0, np.sqrt(nl), float(np.max(anorm, initial=0.0)), float(np.linalg.norm(s.c_lp)))
        x = np.full(nl, xi)
        z = np.full(nl, eta)
    else:
        x = np.zeros(0)
        z = np.zeros(0)
    y = np.zeros(m)

    history: list[tuple[float, float, float, float]] = []
    best = None
    status = "max-iterations"
    certificate = None
    stall = 0

    def measures(X, x, y, Z, z):
        rp = b - s.A_op(X, x)
        ATy, ATy_lp = s.AT_op(y)
        Rd = [C - a - Zk for C, a, Zk in zip(s.C, ATy, Z)]
        rd = s.c_lp - ATy_lp - z
        pobj = float(sum(np.sum(C * Xk) for C, Xk in zip(s.C, X)) + s.c_lp @ x)
        dobj = float(b @ y)
        pinf = float(np.linalg.norm(rp)) / nb
        dinf = float(np.sqrt(sum(np.sum(r**2) for r in Rd) + np.sum(rd**2))) / nc
        return rp, Rd, rd, pobj, dobj, pinf, dinf

    it = 0
    for it in range(max_iter + 1):
        rp, Rd, rd, pobj, dobj, pinf, dinf = measures(X, x, y, Z, z)
        gap = _inner(X, Z, x, z)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        history.append((pobj, dobj, pinf, dinf))
        score = max(relgap, pinf, dinf)
        if best is None or score < best[0]:
            best = (score, it, [a.copy() for a in X], x.copy(), y.copy(), [a.copy() for a in Z], z.copy())
        if relgap <= GAP_TOL and pinf <= FEAS_TOL and dinf <= FEAS_TOL:
            status = "optimal"
            break
        # Farkas-type rays: a growing dual ray means the primal is empty,
        # a growing primal ray means the dual is empty.
        if dobj > 1e6 * nc:
            ATy, ATy_lp = s.AT_op(y)
            ray = np.sqrt(sum(np.sum((a + zk) ** 2) for a, zk in zip(ATy, Z)) + np.sum((ATy_lp + z) ** 2))
            if ray / dobj < INFEAS_TOL:
                status, certificate = "infeasible", float(ray / dobj)
                break
        if -pobj > 1e6 * nb:
            ax = float(np.linalg.norm(s.A_op(X, x)))
            if ax / -pobj < INFEAS_TOL:
                status, certificate = "dual-infeasible", ax / -pobj
                break
        if it == max_iter or stall >= 5:
            break

        mu = gap / ntot
        try:
            step = _newton_step(s, X, x, Z, z, Rd, rd, rp, mu, ntot)
        except (np.linalg.LinAlgError, FloatingPointError, ValueError):
            break
        if step is None:
            break
        (ap, ad, dXn, dxn, dy, dZn, dzn), sigma = step
        stall = stall + 1 if max(ap, ad) < 1e-10 else 0
        log.debug(
            "it=%d mu=%.2e sigma=%.2e ap=%.3f ad=%.3f pinf=%.2e dinf=%.2e pobj=%.6e dobj=%.6e",
            it, mu, sigma, ap, ad, pinf, dinf, pobj, dobj,
        )
        X = [_sym(Xk + ap * d) for Xk, d in zip(X, dXn)]
        Z = [_sym(Zk + ad * d) for Zk, d in zip(Z, dZn)]
        x = x + ap * dxn
        z = z + ad * dzn
        y = y + ad * dy

    if status == "max-iterations" and best is not None:
        _, _, X, x, y, Z, z = best
        rp, Rd, rd, pobj, dobj, pinf, dinf = measures(X, x, y, Z, z)
        relgap = abs(pobj - dobj) / (1.0 + abs(pobj) + abs(dobj))
        # Rounding can stall the last digits; the best iterate is still usable
        # when it meets the nominal stopping tolerance.
        if max(pinf, dinf, relgap) <= ACCEPT_TOL:
            status = "optimal"
    return _Raw(status, X, x, y, Z, z, pobj, dobj, pinf, dinf, it, certificate, history)


def _newton_step(s: _Standard, X, x, Z, z, Rd, rd, rp, mu, ntot):
    """Mehrotra predictor-corrector NT step in original coordinates, with step lengths."""
    m = s.m
    nl = len(x)
    with np.errstate(divide="raise", over="raise", invalid="raise"):
        scal = [_nt_scaling(Xk, Zk) for Xk, Zk in zip(X, Z)]
        At = [np.einsum("ba,ibc,cd->iad", G, A, G, optimize=True) for (G, _), A in zip(scal, s.A)]
        Rdt = [G.T @ R @ G for (G, _), R in zip(scal, Rd)]
        w = np.sqrt(x / z)
        lam_lp = np.sqrt(x * z)
        At_lp = s.A_lp * w
        rdt = w * rd
        M = At_lp @ At_lp.T
        for Ak in At:
            flat = Ak.reshape(m, -1)
            M = M + flat @ flat.T

        def direction(target, corr, corr_lp):
            H = [_lyap_rhs(lam, target, c) for (_, lam), c in zip(scal, corr)]
            h = (target - lam_lp**2 - corr_lp) / lam_lp
            rhs = rp - At_lp @ (h - rdt)
            for Ak, Hk, Rk in zip(At, H, Rdt):
                rhs -= np.tensordot(Ak, Hk - Rk, axes=([1, 2], [0, 1]))
            dy = _solve_schur(M, rhs)
            dZt = [Rk - np.tensordot(dy, Ak, axes=(0, 0)) for Rk, Ak in zip(Rdt, At)]
            dXt = [Hk - d for Hk, d in zip(H, dZt)]
            dzt = rdt - At_lp.T @ dy
            dxt = h - dzt
            return dXt, dxt, dy, dZt, dzt

        def steps(dXt, dxt, dZt, dzt, frac):
            ap = min([_scaled_step(lam, d) for (_, lam), d in zip(scal, dXt)] + [np.inf])
            ad = min([_scaled_step(lam, d) for (_, lam), d in zip(scal, dZt)] + [np.inf])
            ap = min(ap, _max_step_lp(lam_lp, dxt))
            ad = min(ad, _max_step_lp(lam_lp, dzt))
            return min(1.0, frac * ap), min(1.0, frac * ad)

        # predictor
        zeros = [np.zeros((n, n)) for n in s.sizes]
        dXa, dxa, _, dZa, dza = direction(0.0, zeros, np.zeros(nl))
        ap, ad = steps(dXa, dxa, dZa, dza, 1.0)
        mu_aff = (
            sum(
                np.sum((np.diag(lam) + ap * dx_) * (np.diag(lam) + ad * dz_))
                for (_, lam), dx_, dz_ in zip(scal, dXa, dZa)
            )
            + float((lam_lp + ap * dxa) @ (lam_lp + ad * dza))
        ) / ntot
        sigma = min(1.0, max(0.0, (mu_aff / mu) ** 3)) if mu > 0 else 0.0

        # corrector
        corr = [_sym(a @ c) for a, c in zip(dXa, dZa)]
        dXt, dxt, dy, dZt, dzt = direction(sigma * mu, corr, dxa * dza)
        frac = 0.9 + 0.09 * min(ap, ad)
        ap, ad = steps(dXt, dxt, dZt, dzt, frac)

        dX = [G @ d @ G.T for (G, _), d in zip(scal, dXt)]
        # dual step straight from the residual keeps the dual equations exact
        ATdy, ATdy_lp = s.AT_op(dy)
        dZ = [R - a for R, a in zip(Rd, ATdy)]
        dx = w * dxt
        dz = rd - ATdy_lp
        for arr in [dy, dx, dz] + dX + dZ:
            if not np.all(np.isfinite(arr)):
                return None
    return (ap, ad, dX, dx, dy, dZ, dz), sigma


def solve(problem: SdpProblem, dump: str | Path | None = None, max_iter: int = MAX_ITER) -> SdpSolution:
    """Solve ``problem``; deterministic for a fixed input."""
    if dump is not None:
        problem.dump(dump)
    s, sdp_src, lp_src = _standard_from_problem(problem)
    r = _ipm(s, max_iter)
    primal = _collect_primal(problem, sdp_src, lp_src, r.X, r.x)
    status = r.status
    if status == "dual-infeasible":
        status = "unbounded"
    if status == "optimal" and _violation(problem, primal) > CONTRACT_FEAS:
        status = "max-iterations"
    sign = s.sign
    return SdpSolution(
        status=status,
        objective_value=sign * r.pobj,
        primal=primal,
        dual=sign * r.y,
        duality_gap=abs(r.pobj - r.dobj),
        primal_infeasibility=r.pinf,
        dual_infeasibility=r.dinf,
        iterations=r.iterations,
        dual_objective=sign * r.dobj,
        certificate=r.certificate,
        history=[(sign * a, sign * b_, c, d) for a, b_, c, d in r.history],
    )


def _collect_primal(p: SdpProblem, sdp_src, lp_src, X: list[np.ndarray], x: np.ndarray) -> list[np.ndarray]:
    out: list[np.ndarray | None] = [None] * len(p.blocks)
    for j, k in enumerate(sdp_src):
        if p.blocks[k].field == "complex":
            # internal variable is embed(X) / 2
            out[k] = 2.0 * unembed(X[j])
        else:
            out[k] = X[j].copy()
    for j, (kind, idx) in enumerate(lp_src):
        if kind == "block":
            dtype = complex if p.blocks[idx].field == "complex" else float
            out[idx] = np.array([[x[j]]], dtype=dtype)
    return out


def _embed_stack(f: np.ndarray) -> np.ndarray:
    re, im = f.real, f.imag
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


@dataclass
class LmiBlock:
    """Matrix inequality ``f0 + sum_i y_i f[i] >= 0`` (Hermitian n x n)."""

    f0: np.ndarray
    f: np.ndarray  # (n_vars, n, n)

    def value(self, y: np.ndarray) -> np.ndarray:
        return self.f0 + np.tensordot(y, self.f, axes=(0, 0))


@dataclass
class LmiProblem:
    """max c'y  s.t.  every LmiBlock is PSD and g0 + g y >= 0 componentwise.

    The Schur system has one row per free variable, so redundant data rows
    never make it singular.
    """

    c: np.ndarray
    blocks: list[LmiBlock]
    g0: np.ndarray | None = None
    g: np.ndarray | None = None

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float)
        n = len(self.c)
        for blk in self.blocks:
            blk.f0 = np.asarray(blk.f0)
            blk.f = np.asarray(blk.f)
            if blk.f.shape != (n,) + blk.f0.shape:
                raise ValueError(f"LMI block coefficients have shape {blk.f.shape}, expected {(n,) + blk.f0.shape}")
        if self.g is None:
            self.g0, self.g = np.zeros(0), np.zeros((0, n))
        self.g0 = np.asarray(self.g0, dtype=float)
        self.g = np.asarray(self.g, dtype=float)
        if self.g.shape != (len(self.g0), n):
            raise ValueError("scalar constraints need g of shape (len(g0), n_vars)")


@dataclass
class LmiSolution:
    status: str
    objective_value: float  # c'y at the returned point
    upper_bound: float  # objective of the Lagrange dual, bounds every feasible c'y from above
    y: np.ndarray
    primal_infeasibility: float
    dual_infeasibility: float
    iterations: int
    # absolute residual of the multiplier equations; with ||y|| <= R on the
    # feasible set, upper_bound + R * multiplier_residual is a rigorous bound
    multiplier_residual: float = 0.0
    # smallest eigenvalue / slack of the constraints at y (>= 0 means feasible)
    y_margin: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def solve_lmi(problem: LmiProblem, max_iter: int = MAX_ITER) -> LmiSolution:
    C, A = [], []
    for blk in problem.blocks:
        if np.iscomplexobj(blk.f0) or np.iscomplexobj(blk.f):
            C.append(_embed_stack(np.asarray(blk.f0, dtype=complex)))
            A.append(-_embed_stack(np.asarray(blk.f, dtype=complex)))
        else:
            C.append(np.asarray(blk.f0, dtype=float))
            A.append(-np.asarray(blk.f, dtype=float))
    s = _Standard(C, A, problem.g0.copy(), -problem.g.T.copy(), problem.c.copy())
    r = _ipm(s, max_iter)
    status = {"infeasible": "unbounded", "dual-infeasible": "infeasible"}.get(r.status, r.status)
    worst = min(
        [np.linalg.eigvalsh(blk.value(r.y))[0] for blk in problem.blocks]
        + [float(np.min(problem.g0 + problem.g @ r.y, initial=np.inf))]
    )
    # the returned point must actually satisfy the constraints
    if status == "optimal" and worst < -CONTRACT_FEAS:
        status = "max-iterations"
    return LmiSolution(
        status=status,
        objective_value=float(problem.c @ r.y),
        upper_bound=r.pobj,
        y=r.y,
        primal_infeasibility=r.pinf,
        dual_infeasibility=r.dinf,
        iterations=r.iterations,
        multiplier_residual=float(np.linalg.norm(s.b - s.A_op(r.X, r.x))),
        y_margin=float(worst),
    )


def constraint_values(problem: SdpProblem, primal: list[np.ndarray]) -> np.ndarray:
    vals = []
    for c in problem.constraints:
        v = 0.0
        for a, X in zip(c.coeffs, primal):
            if a is not None:
                v += float(np.real(np.sum(np.conj(np.asarray(a)) * X)))
        vals.append(v)
    return np.asarray(vals)


def _violation(problem: SdpProblem, primal: list[np.ndarray]) -> float:
    """Largest absolute constraint violation of ``primal``."""
    vals = constraint_values(problem, primal)
    worst = 0.0
    for v, c in zip(vals, problem.constraints):
        if c.relation == "=":
            worst = max(worst, abs(v - c.rhs))
        elif c.relation == "<=":
            worst = max(worst, v - c.rhs)
        else:
            worst = max(worst, c.rhs - v)
    return worst


def max_violation(problem: SdpProblem, sol: SdpSolution) -> float:
    return _violation(problem, sol.primal)


def lambda_min_problem(h: np.ndarray) -> SdpProblem:
    """min <H, X> s.t. tr X = 1, X >= 0; its dual is max t s.t. H - t I >= 0."""
    h = np.asarray(h)
    n = h.shape[0]
    fld = "complex" if np.iscomplexobj(h) and np.any(h.imag != 0) else "real"
    blk = Block(n, fld)
    return SdpProblem([blk], [h], [Constraint([np.eye(n)], 1.0, "=")], "min")


def lambda_min_sdp(h: np.ndarray) -> float:
    sol = solve(lambda_min_problem(h))
    if not sol.optimal:
        raise SdpError(f"lambda_min SDP ended with status {sol.status}")
    return float(sol.dual[0])
