"""Independent reference computations.

Nothing here imports the package. Each function recomputes a quantity by a
different route (explicit loops, closed forms, brute-force search) so the
frozen numbers in the tests do not rest on the code under test.
"""

from __future__ import annotations

import cmath
import itertools
import math

import numpy as np


# -- linear algebra ---------------------------------------------------------


def kron_entrywise(a, b):
    """(a (x) b)[3i + j, 3k + l] = a[i, k] b[j, l], by explicit loops."""
    n, m = len(a), len(b)
    out = [[0j] * (n * m) for _ in range(n * m)]
    for i in range(n):
        for k in range(n):
            for j in range(m):
                for l in range(m):
                    out[m * i + j][m * k + l] = a[i][k] * b[j][l]
    return np.array(out)


def phi_plus_density():
    rho = [[0.0] * 9 for _ in range(9)]
    for r in (0, 4, 8):
        for c in (0, 4, 8):
            rho[r][c] = 1.0 / 3.0
    return np.array(rho, dtype=complex)


def partial_trace_loops(rho, keep):
    """Marginal on 'A' or 'B' by summing the traced index explicitly."""
    out = np.zeros((3, 3), dtype=complex)
    for x in range(3):
        for y in range(3):
            s = 0j
            for t in range(3):
                if keep == "A":
                    s += rho[3 * x + t][3 * y + t]
                else:
                    s += rho[3 * t + x][3 * t + y]
            out[x, y] = s
    return out


def partial_transpose_loops(rho):
    """<ij|rho^G|kl> = <il|rho|kj>."""
    out = np.zeros((9, 9), dtype=complex)
    for i, j, k, l in itertools.product(range(3), repeat=4):
        out[3 * i + j, 3 * k + l] = rho[3 * i + l][3 * k + j]
    return out


def phi_plus_pt_spectrum():
    """Closed form: the partial transpose of |phi+><phi+| is SWAP / 3.

    SWAP has eigenvalue +1 on the 6-dim symmetric and -1 on the 3-dim
    antisymmetric subspace.
    """
    return sorted([-1.0 / 3.0] * 3 + [1.0 / 3.0] * 6)


# -- GF(9) and MUBs -----------------------------------------------------------


def gf9_trace_closed_form(c0, c1):
    """Frobenius: (c0 + c1 x)^3 = c0 - c1 x in GF(3)[x]/(x^2+1), so tr = 2 c0."""
    return (2 * c0) % 3


def gf9_mul_poly(a, b):
    """Schoolbook polynomial product reduced by x^2 = -1, coefficients mod 3."""
    p = [0, 0, 0]
    for i, ai in enumerate(a):
        for j, bj in enumerate(b):
            p[i + j] += ai * bj
    return ((p[0] - p[2]) % 3, p[1] % 3)


def gf9_inverse_table():
    """Every nonzero element's inverse by exhaustive search."""
    elems = [(c0, c1) for c1 in range(3) for c0 in range(3)]
    inv = {}
    for a in elems[1:]:
        for b in elems[1:]:
            if gf9_mul_poly(a, b) == (1, 0):
                inv[a] = b
    return inv


def mub_overlap_extremes(vectors):
    """Max orthonormality and unbiasedness deviations by nested loops over vectors."""
    nb = len(vectors)
    orth = 0.0
    unb = 0.0
    for a in range(nb):
        for m in range(9):
            for b in range(a, nb):
                for n in range(9):
                    ip = sum(vectors[a][m][x].conjugate() * vectors[b][n][x] for x in range(9))
                    if a == b:
                        orth = max(orth, abs(ip - (1.0 if m == n else 0.0)))
                    else:
                        unb = max(unb, abs(abs(ip) ** 2 - 1.0 / 9.0))
    return orth, unb


# -- states -------------------------------------------------------------------


def schmidt_concurrence_from_transmissions(t_diag):
    """Diagonal-slit state: Schmidt probabilities t_j / sum(t), C^2 = 2 (1 - sum p^2)."""
    s = sum(t_diag)
    return 2.0 * (1.0 - sum((t / s) ** 2 for t in t_diag))


def gaussian_amplitudes(waist, offset=0.0):
    amps = [math.exp(-((l - offset) ** 2) / waist**2) for l in range(-4, 5)]
    n = math.sqrt(sum(a * a for a in amps))
    return [a / n for a in amps]


# -- witness / guess ----------------------------------------------------------


def max_lambda_min_sweep(steps=21, radius=0.3, seed=7):
    """Brute-force sweep for the phi+ computational-basis guess.

    With zero weight on the six off-diagonal kets the state lives on the
    {|00>, |11>, |22>} block with diagonal fixed at 1/3. Sweep the three
    complex coherences over a grid of magnitudes and random phases and
    return the best lambda_min and the coherence magnitude achieving it.
    """
    rng = np.random.default_rng(seed)
    best = (-np.inf, None)
    for r in np.linspace(0.0, radius, steps):
        for _ in range(40):
            ph = rng.uniform(0, 2 * np.pi, size=3)
            mags = r * rng.uniform(0, 1, size=3)
            c = mags * np.exp(1j * ph)
            blk = np.diag([1 / 3] * 3).astype(complex)
            blk[0, 1], blk[0, 2], blk[1, 2] = c
            blk[1, 0], blk[2, 0], blk[2, 1] = np.conj(c)
            lam = float(np.linalg.eigvalsh(blk)[0])
            if lam > best[0]:
                best = (lam, float(np.max(np.abs(c))))
    return best


# -- tomography ---------------------------------------------------------------


def mub_vectors_direct():
    """The 10 MUB vectors written out from the trace formula, independent of the package."""
    omega = cmath.exp(2j * math.pi / 3)
    elems = [(k % 3, k // 3) for k in range(9)]

    def tr(e):
        return gf9_trace_closed_form(*e)

    def add(u, v):
        return ((u[0] + v[0]) % 3, (u[1] + v[1]) % 3)

    vecs = []
    for b in elems:
        basis = []
        for a in elems:
            basis.append([omega ** tr(add(gf9_mul_poly(a, x), gf9_mul_poly(b, gf9_mul_poly(x, x)))) / 3 for x in elems])
        vecs.append(basis)
    vecs.append([[1.0 if x == m else 0.0 for x in range(9)] for m in range(9)])
    return np.array(vecs, dtype=complex)


def forced_purity_cost_sampled(n_samples=4000, seed=3):
    """Smallest sum_k (|<v_k|psi>|^2 - 1/9)^2 over random pure psi (maximally mixed data)."""
    vecs = mub_vectors_direct().reshape(90, 9)
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(n_samples):
        psi = rng.normal(size=9) + 1j * rng.normal(size=9)
        psi /= np.linalg.norm(psi)
        q = np.abs(np.conj(vecs) @ psi) ** 2
        best = min(best, float(np.sum((q - 1 / 9) ** 2)))
    return best


def schmidt_concurrence(coeffs):
    """C^2 = 2 (1 - sum lambda^4) for Schmidt amplitudes lambda."""
    return 2.0 * (1.0 - sum(c**4 for c in coeffs))
