"""Mutually unbiased bases of the two-qutrit space from GF(9) arithmetic.

The field is GF(3)[x]/(x^2 + 1). Elements are enumerated by ``c0 + 3*c1``;
that enumeration orders both the vector components and the basis labels.
Bases 1..9 carry the field parameter ``b`` (enumeration index ``alpha - 1``),
basis 10 is the computational basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qlin import DIM, matrix_to_json

N_BASES = 10
COMPUTATIONAL = 10
ORTH_TOL = 1e-10
UNBIASED_TOL = 1e-10


@dataclass(frozen=True, order=True)
class Gf9Element:
    c0: int
    c1: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "c0", self.c0 % 3)
        object.__setattr__(self, "c1", self.c1 % 3)

    @classmethod
    def from_index(cls, k: int) -> "Gf9Element":
        return cls(k % 3, k // 3)

    @property
    def index(self) -> int:
        return self.c0 + 3 * self.c1

    def __add__(self, other: "Gf9Element") -> "Gf9Element":
        return Gf9Element(self.c0 + other.c0, self.c1 + other.c1)

    def __neg__(self) -> "Gf9Element":
        return Gf9Element(-self.c0, -self.c1)

    def __mul__(self, other: "Gf9Element") -> "Gf9Element":
        return gf9_mul(self, other)

    def __pow__(self, n: int) -> "Gf9Element":
        out = ONE
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "Gf9Element":
        if self == ZERO:
            raise ZeroDivisionError("0 has no inverse in GF(9)")
        for k in range(1, 9):
            cand = Gf9Element.from_index(k)
            if self * cand == ONE:
                return cand
        raise AssertionError("GF(9) arithmetic is broken")  # pragma: no cover


ZERO = Gf9Element(0, 0)
ONE = Gf9Element(1, 0)
X = Gf9Element(0, 1)
ELEMENTS = tuple(Gf9Element.from_index(k) for k in range(9))


def gf9_mul(a: Gf9Element, b: Gf9Element) -> Gf9Element:
    # x^2 = -1
    return Gf9Element(a.c0 * b.c0 - a.c1 * b.c1, a.c0 * b.c1 + a.c1 * b.c0)


def gf9_trace(a: Gf9Element) -> int:
    """Field trace a + a^3, which lands in the prime subfield GF(3)."""
    t = a + a**3
    assert t.c1 == 0
    return t.c0


@dataclass(frozen=True)
class MubFamily:
    """Ten ordered bases; ``vectors[alpha - 1, m - 1]`` is |psi_m^(alpha)>.

    No invariants are enforced here so that broken families can be handed to
    :func:`verify_mub`.
    """

    vectors: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.vectors, dtype=complex)
        if v.ndim != 3 or v.shape[1:] != (DIM, DIM):
            raise ValueError(f"expected (n_bases, {DIM}, {DIM}) vectors, got {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @property
    def n_bases(self) -> int:
        return self.vectors.shape[0]

    def vector(self, alpha: int, m: int) -> np.ndarray:
        return self.vectors[alpha - 1, m - 1]

    def projector(self, alpha: int, m: int) -> np.ndarray:
        v = self.vector(alpha, m)
        return np.outer(v, np.conj(v))

    def projectors(self) -> list["Projector"]:
        return [
            Projector(alpha, m, self.projector(alpha, m))
            for alpha in range(1, self.n_bases + 1)
            for m in range(1, DIM + 1)
        ]

    def to_json(self) -> dict:
        return {
            "bases": [
                [matrix_to_json(self.vectors[a, m].reshape(DIM, 1)) for m in range(DIM)]
                for a in range(self.n_bases)
            ]
        }


@dataclass(frozen=True)
class Projector:
    basis_index: int
    vector_index: int
    matrix: np.ndarray


@lru_cache(maxsize=1)
def build_mub_family() -> MubFamily:
    omega = np.exp(2j * np.pi / 3)
    vecs = np.zeros((N_BASES, DIM, DIM), dtype=complex)
    for bi, b in enumerate(ELEMENTS):
        for ai, a in enumerate(ELEMENTS):
            for xi, x in enumerate(ELEMENTS):
                vecs[bi, ai, xi] = omega ** gf9_trace(a * x + b * x * x) / 3.0
    vecs[COMPUTATIONAL - 1] = np.eye(DIM)
    return MubFamily(vecs)


@dataclass(frozen=True)
class MubReport:
    orthonormality_deviation: float
    unbiasedness_deviation: float

    @property
    def passed(self) -> bool:
        return (
            self.orthonormality_deviation <= ORTH_TOL
            and self.unbiasedness_deviation <= UNBIASED_TOL
        )

    def __str__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (
            f"{verdict}: max orthonormality deviation {self.orthonormality_deviation:.3e}, "
            f"max unbiasedness deviation {self.unbiasedness_deviation:.3e}"
        )


def verify_mub(family: MubFamily) -> MubReport:
    v = family.vectors
    nb = family.n_bases
    # gram[a, m, b, n] = <psi_m^a | psi_n^b>
    gram = np.einsum("amx,bnx->ambn", np.conj(v), v)
    orth = 0.0
    unb = 0.0
    eye = np.eye(DIM)
    for a in range(nb):
        orth = max(orth, float(np.max(np.abs(gram[a, :, a, :] - eye))))
        for b in range(a + 1, nb):
            unb = max(unb, float(np.max(np.abs(np.abs(gram[a, :, b, :]) ** 2 - 1.0 / DIM))))
    return MubReport(orth, unb)


def design_matrix(family: MubFamily) -> np.ndarray:
    """Real (n_projectors x 81) matrix whose rows are the vectorized projectors.

    Coordinates are the orthonormal Hermitian basis: diagonal entries, then
    sqrt(2) Re and sqrt(2) Im of the strict upper triangle.
    """
    iu = np.triu_indices(DIM, k=1)
    rows = []
    for p in family.projectors():
        m = p.matrix
        rows.append(
            np.concatenate(
                [np.diag(m).real, np.sqrt(2) * m[iu].real, np.sqrt(2) * m[iu].imag]
            )
        )
    return np.asarray(rows)
