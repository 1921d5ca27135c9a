import itertools

import numpy as np
import pytest
from hypothesis import given

import oracles
from fastent.measure import MeasurementPlan, exact_probabilities
from fastent.mub import (
    ELEMENTS,
    ONE,
    X,
    ZERO,
    Gf9Element,
    MubFamily,
    build_mub_family,
    design_matrix,
    gf9_mul,
    gf9_trace,
    verify_mub,
)
from strategies import density_matrices

# frozen from oracles.gf9_trace_closed_form over the c0 + 3 c1 enumeration
TRACE_TABLE = [0, 2, 1, 0, 2, 1, 0, 2, 1]
# frozen from oracles.gf9_inverse_table (exhaustive search)
INVERSES = {
    (1, 0): (1, 0), (2, 0): (2, 0), (0, 1): (0, 2), (1, 1): (2, 1),
    (2, 1): (1, 1), (0, 2): (0, 1), (1, 2): (2, 2), (2, 2): (1, 2),
}


class TestField:
    def test_defining_relation(self):
        assert X * X == Gf9Element(2, 0)

    def test_trace_values(self):
        assert gf9_trace(ZERO) == 0
        assert gf9_trace(ONE) == 2
        assert [gf9_trace(e) for e in ELEMENTS] == TRACE_TABLE
        assert TRACE_TABLE == [oracles.gf9_trace_closed_form(e.c0, e.c1) for e in ELEMENTS]

    def test_inverses(self):
        assert INVERSES == oracles.gf9_inverse_table()
        for e in ELEMENTS[1:]:
            inv = e.inverse()
            assert (inv.c0, inv.c1) == INVERSES[(e.c0, e.c1)]
            assert e * inv == ONE
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    def test_multiplication_matches_polynomials(self):
        for a, b in itertools.product(ELEMENTS, repeat=2):
            p = gf9_mul(a, b)
            assert (p.c0, p.c1) == oracles.gf9_mul_poly((a.c0, a.c1), (b.c0, b.c1))

    def test_field_axioms(self):
        for a, b, c in itertools.product(ELEMENTS, repeat=3):
            assert a * (b + c) == a * b + a * c
            assert (a * b) * c == a * (b * c)
            assert a * b == b * a

    def test_trace_linear(self):
        for a, b in itertools.product(ELEMENTS, repeat=2):
            assert gf9_trace(a + b) == (gf9_trace(a) + gf9_trace(b)) % 3
            for s in range(3):
                assert gf9_trace(Gf9Element(s, 0) * a) == (s * gf9_trace(a)) % 3

    def test_coefficients_reduced(self):
        e = Gf9Element(5, -1)
        assert (e.c0, e.c1) == (2, 2)


class TestFamily:
    def test_passes_verification(self, mubs):
        report = verify_mub(mubs)
        assert report.passed
        assert report.orthonormality_deviation <= 1e-10
        assert report.unbiasedness_deviation <= 1e-10
        assert str(report).startswith("PASS")

    def test_matches_direct_construction(self, mubs):
        assert np.max(np.abs(mubs.vectors - oracles.mub_vectors_direct())) <= 1e-14

    def test_oracle_overlaps(self, mubs):
        orth, unb = oracles.mub_overlap_extremes(mubs.vectors.tolist())
        assert orth <= 1e-10 and unb <= 1e-10

    def test_computational_basis_last(self, mubs):
        for m in range(1, 10):
            e = np.zeros(9)
            e[m - 1] = 1
            assert np.array_equal(mubs.vector(10, m), e)

    def test_deterministic(self):
        a = build_mub_family()
        build_mub_family.cache_clear()
        b = build_mub_family()
        assert np.array_equal(a.vectors, b.vectors)

    def test_projector_sum(self, mubs):
        total = sum(p.matrix for p in mubs.projectors())
        assert np.max(np.abs(total - 10 * np.eye(9))) <= 1e-9

    def test_projectors_idempotent(self, mubs):
        ps = mubs.projectors()
        assert len(ps) == 90
        for p in ps:
            assert np.max(np.abs(p.matrix @ p.matrix - p.matrix)) <= 1e-10
            assert abs(np.trace(p.matrix) - 1) <= 1e-10

    def test_immutable(self, mubs):
        with pytest.raises(ValueError):
            mubs.vectors[0, 0, 0] = 1

    def test_bad_shape(self):
        with pytest.raises(ValueError):
            MubFamily(np.zeros((10, 9, 8)))


class TestVerifyFailures:
    def test_scaled_vector(self, mubs):
        v = mubs.vectors.copy()
        v[3, 2] *= 1.01
        report = verify_mub(MubFamily(v))
        assert not report.passed
        # 1.01^2 - 1
        assert report.orthonormality_deviation == pytest.approx(0.0201, abs=1e-12)

    def test_duplicate_computational(self, mubs):
        v = mubs.vectors.copy()
        v[0] = np.eye(9)
        report = verify_mub(MubFamily(v))
        assert not report.passed
        assert report.unbiasedness_deviation == pytest.approx(8 / 9, abs=1e-12)
        assert str(report).startswith("FAIL")


def test_design_matrix_rank(mubs):
    d = design_matrix(mubs)
    assert d.shape == (90, 81)
    s = np.linalg.svd(d, compute_uv=False)
    assert int(np.sum(s > 1e-8)) == 81


@given(density_matrices())
def test_basis_probabilities_sum_to_one(rho):
    mubs = build_mub_family()
    recs = exact_probabilities(rho, MeasurementPlan(shots=None), mubs)
    p = np.array([r.p_hat for r in recs]).reshape(10, 9)
    assert np.max(np.abs(p.sum(axis=1) - 1)) <= 1e-10


@given(density_matrices())
def test_reconstruction_identity(rho):
    mubs = build_mub_family()
    out = -np.eye(9, dtype=complex)
    for p in mubs.projectors():
        out += np.trace(rho.mat @ p.matrix).real * p.matrix
    assert np.max(np.abs(out - rho.mat)) <= 1e-9
