"""Dense complex linear algebra and two-qutrit state primitives.

Matrices are plain ``numpy`` complex arrays. Bipartite indexing follows the
row-major Kronecker convention: logical ket ``|ij>`` sits at position
``3*i + j`` and subsystem A indexes the slow axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DIM_SUB = 3
DIM = DIM_SUB * DIM_SUB

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
NORM_TOL = 1e-12


class NotHermitianError(ValueError):
    """Raised when a matrix expected to be Hermitian is not."""


class InvalidStateError(ValueError):
    """Raised when a density matrix or pure state violates its invariants."""


def slit_to_pair(l: int) -> tuple[int, int]:
    """Map slit label ``l in -4..4`` to the qutrit pair ``(i, j)``."""
    if not -4 <= l <= 4:
        raise ValueError(f"slit label {l} outside -4..4")
    return divmod(l + 4, 3)


def pair_to_slit(i: int, j: int) -> int:
    return 3 * i + j - 4


def ket(i: int, j: int) -> np.ndarray:
    v = np.zeros(DIM, dtype=complex)
    v[3 * i + j] = 1.0
    return v


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def max_asymmetry(h: np.ndarray) -> float:
    h = np.asarray(h)
    return float(np.max(np.abs(h - dagger(h)))) if h.size else 0.0


def allclose(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    """Entrywise comparison with an explicit absolute tolerance."""
    return bool(np.max(np.abs(np.asarray(a) - np.asarray(b))) <= tol)


def hermitize(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    return 0.5 * (h + dagger(h))


def eig_hermitian(h: np.ndarray, tol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors (columns) of ``h``.

    Each eigenvector is phase-fixed so its first component with modulus above
    1e-12 is real and positive.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {h.shape}")
    asym = max_asymmetry(h)
    if asym > tol:
        raise NotHermitianError(f"matrix is not Hermitian: max |H - H^dag| = {asym:.3e}")
    w, v = np.linalg.eigh(hermitize(h))
    for k in range(v.shape[1]):
        v[:, k] = fix_phase(v[:, k])
    return w, v


def fix_phase(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate the global phase so the first component above ``tol`` is real positive."""
    v = np.asarray(v, dtype=complex)
    big = np.flatnonzero(np.abs(v) > tol)
    if big.size == 0:
        return v.copy()
    c = v[big[0]]
    return v * (abs(c) / c)


def lambda_min(h: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(hermitize(h))[0])


def partial_trace(rho: "DensityMatrix | np.ndarray", subsystem: str) -> np.ndarray:
    """Reduced 3x3 state on ``subsystem`` ('A' or 'B'); the other one is traced out."""
    m = _as_matrix(rho).reshape(DIM_SUB, DIM_SUB, DIM_SUB, DIM_SUB)
    if subsystem == "A":
        return np.einsum("ijkj->ik", m)
    if subsystem == "B":
        return np.einsum("ijil->jl", m)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def partial_transpose(rho: "DensityMatrix | np.ndarray") -> np.ndarray:
    """Transpose on subsystem B."""
    m = _as_matrix(rho).reshape(DIM_SUB, DIM_SUB, DIM_SUB, DIM_SUB)
    return m.transpose(0, 3, 2, 1).reshape(DIM, DIM)


def traceless_hermitian_basis(n: int = DIM) -> np.ndarray:
    """Frobenius-orthonormal basis (n^2 - 1, n, n) of traceless Hermitian matrices."""
    out = []
    s = 1.0 / np.sqrt(2.0)
    for j in range(n):
        for k in range(j + 1, n):
            e = np.zeros((n, n), dtype=complex)
            e[j, k] = e[k, j] = s
            out.append(e)
            e = np.zeros((n, n), dtype=complex)
            e[j, k], e[k, j] = -1j * s, 1j * s
            out.append(e)
    for d in range(1, n):
        # generalized Gell-Mann diagonals
        diag = np.zeros(n)
        diag[:d] = 1.0
        diag[d] = -d
        out.append(np.diag(diag / np.sqrt(d * (d + 1))).astype(complex))
    return np.asarray(out)


def _as_matrix(rho) -> np.ndarray:
    if isinstance(rho, DensityMatrix):
        return rho.mat
    m = np.asarray(rho, dtype=complex)
    if m.shape != (DIM, DIM):
        raise ValueError(f"expected a {DIM}x{DIM} matrix, got {m.shape}")
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PureState:
    """Unit vector of two qutrits; ``amplitudes[3*i + j]`` is alpha_ij."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.shape != (DIM,):
            raise InvalidStateError(f"pure state needs {DIM} amplitudes, got {a.shape[0]}")
        norm2 = float(np.vdot(a, a).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"pure state not normalized: |psi|^2 = {norm2!r}")
        object.__setattr__(self, "amplitudes", _frozen(a))

    @classmethod
    def normalized(cls, amplitudes) -> "PureState":
        a = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = np.linalg.norm(a)
        if n == 0:
            raise InvalidStateError("cannot normalize the zero vector")
        return cls(a / n)

    def amplitude(self, i: int, j: int) -> complex:
        return complex(self.amplitudes[3 * i + j])

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, np.conj(self.amplitudes))

    def density(self) -> "DensityMatrix":
        return DensityMatrix(self.projector())

    def coefficient_matrix(self) -> np.ndarray:
        """3x3 matrix of alpha_ij; its singular values are the Schmidt coefficients."""
        return self.amplitudes.reshape(DIM_SUB, DIM_SUB)


@dataclass(frozen=True)
class DensityMatrix:
    """9x9 Hermitian, unit-trace, positive semidefinite matrix with a (3, 3) bipartition.

    Small Hermiticity and trace defects are rejected rather than repaired; use
    :meth:`from_matrix` to hermitize and renormalize first.
    """

    mat: np.ndarray
    dims: tuple[int, int] = field(default=(DIM_SUB, DIM_SUB))

    def __post_init__(self) -> None:
        m = np.asarray(self.mat, dtype=complex)
        if m.shape != (DIM, DIM):
            raise InvalidStateError(f"density matrix must be {DIM}x{DIM}, got {m.shape}")
        asym = max_asymmetry(m)
        if asym > HERMITIAN_TOL:
            raise InvalidStateError(f"density matrix not Hermitian (max asymmetry {asym:.2e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidStateError(f"density matrix trace {tr.real:.15g} != 1")
        lmin = lambda_min(m)
        if lmin < -PSD_TOL:
            raise InvalidStateError(f"density matrix not PSD: lambda_min = {lmin:.3e}")
        object.__setattr__(self, "mat", _frozen(hermitize(m)))

    @classmethod
    def from_matrix(cls, m) -> "DensityMatrix":
        m = hermitize(m)
        return cls(m / np.trace(m).real)

    @classmethod
    def maximally_mixed(cls) -> "DensityMatrix":
        return cls(np.eye(DIM, dtype=complex) / DIM)

    def partial_trace(self, subsystem: str) -> np.ndarray:
        return partial_trace(self, subsystem)

    def partial_transpose(self) -> np.ndarray:
        return partial_transpose(self)

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))


def fidelity_pure(target: PureState, rho: DensityMatrix | np.ndarray) -> float:
    """Fidelity <psi|rho|psi> of ``rho`` with a pure target, clipped to [0, 1]."""
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    psi = target.amplitudes
    f = float(np.real(np.vdot(psi, m @ psi)))
    return min(max(f, 0.0), 1.0)


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=complex))
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "re": [float(x) for x in m.real.reshape(-1)],
        "im": [float(x) for x in m.imag.reshape(-1)],
    }


def matrix_from_json(d: dict) -> np.ndarray:
    rows, cols = int(d["rows"]), int(d["cols"])
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise ValueError(f"matrix payload has {re.size}/{im.size} entries, expected {rows * cols}")
    return (re + 1j * im).reshape(rows, cols)


def random_pure_state(rng: np.random.Generator) -> PureState:
    v = rng.normal(size=DIM) + 1j * rng.normal(size=DIM)
    return PureState.normalized(v)


def random_density_matrix(rng: np.random.Generator, rank: int = DIM) -> DensityMatrix:
    """Ginibre-distributed mixed state of the given rank."""
    g = rng.normal(size=(DIM, rank)) + 1j * rng.normal(size=(DIM, rank))
    return DensityMatrix.from_matrix(g @ dagger(g))


def random_product_state(rng: np.random.Generator) -> PureState:
    a = rng.normal(size=DIM_SUB) + 1j * rng.normal(size=DIM_SUB)
    b = rng.normal(size=DIM_SUB) + 1j * rng.normal(size=DIM_SUB)
    return PureState.normalized(np.kron(a, b))
