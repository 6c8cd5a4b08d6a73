import numpy as np
import pytest

from hyplyap import monodromy
from hyplyap.errors import InvalidParams, SingularMatrix, SingularSystem
from hyplyap.experiments import cy_matrices
from hyplyap.monodromy import (
    build,
    det_diag_plus_rank_one,
    from_explicit,
    unit_circle,
    verify,
)
from hyplyap.params import HGParams

from conftest import random_params


def dense_det(d, x):
    """Brute-force oracle: determinant of diag(d) + 1 x^t."""
    d = np.asarray(d, dtype=complex)
    x = np.asarray(x, dtype=complex)
    return complex(np.linalg.det(np.diag(d) + np.outer(np.ones(d.size), x)))


class TestDetLemma:
    def test_identity_matrix(self):
        assert det_diag_plus_rank_one([1, 1, 1], [0, 0, 0]) == pytest.approx(1.0)

    def test_one_by_one(self):
        assert det_diag_plus_rank_one([2 + 1j], [3 - 1j]) == pytest.approx(5.0)

    def test_two_by_two(self):
        # [[3, 1], [1, 4]] has determinant 11
        assert det_diag_plus_rank_one([2, 3], [1, 1]) == pytest.approx(11.0)

    def test_matches_dense_determinant(self, rng):
        for _ in range(200):
            n = rng.integers(1, 9)
            d = rng.normal(size=n) + 1j * rng.normal(size=n)
            x = rng.normal(size=n) + 1j * rng.normal(size=n)
            expected = dense_det(d, x)
            got = det_diag_plus_rank_one(d, x)
            assert abs(got - expected) <= 1e-10 * max(1.0, abs(expected))

    def test_zero_diagonal_entries(self, rng):
        for zeros in (1, 2):
            for _ in range(50):
                n = int(rng.integers(2, 7))
                d = rng.normal(size=n) + 1j * rng.normal(size=n)
                d[rng.choice(n, size=zeros, replace=False)] = 0.0
                x = rng.normal(size=n) + 1j * rng.normal(size=n)
                expected = dense_det(d, x)
                assert abs(det_diag_plus_rank_one(d, x) - expected) <= 1e-10 * max(1.0, abs(expected))


class TestBuild:
    def test_rank_one_closed_form(self):
        ms = build(HGParams([0.0], [0.5]))
        assert ms.m0[0, 0] == pytest.approx(1.0)
        assert ms.m1[0, 0] == pytest.approx(-1.0)
        assert ms.minf[0, 0] == pytest.approx(-1.0)

    def test_minf_eigenvalues_match_beta(self, rng):
        for _ in range(25):
            params = random_params(rng, int(rng.integers(1, 5)))
            ms = build(params)
            eigs = np.sort_complex(np.linalg.eigvals(ms.minf))
            expected = np.sort_complex(np.conj(unit_circle(params.beta)))
            assert np.abs(eigs - expected).max() < 1e-7

    def test_m1_minus_id_has_rank_one(self, rng):
        for _ in range(25):
            params = random_params(rng, int(rng.integers(2, 5)))
            ms = build(params)
            s = np.linalg.svd(ms.m1 - np.eye(ms.n), compute_uv=False)
            assert s[0] > 0
            assert (s[1:] <= 1e-8 * s[0]).all()

    def test_relation_residual(self, rng):
        for _ in range(25):
            params = random_params(rng, int(rng.integers(1, 6)))
            ms = build(params)
            tol = 1e-9 * max(1.0, ms.trace.condition_estimate)
            assert ms.relation_residual() <= tol

    def test_w_solves_row_equations(self, rng):
        # sum_i w_i / (e^{2 pi i beta_j} - e^{2 pi i alpha_i}) = 1 for all j
        for _ in range(25):
            params = random_params(rng, int(rng.integers(1, 6)))
            ms = build(params)
            residual = ms.trace.w @ ms.trace.N - 1.0
            assert np.abs(residual).max() <= 1e-8 * max(1.0, ms.trace.condition_estimate)

    def test_nearly_confluent_parameters_rejected(self):
        with pytest.raises(SingularSystem):
            build(HGParams([0.3, 0.3 + 1e-15], [0.7, 0.9]))

    def test_repeated_parameters_rejected(self):
        with pytest.raises(InvalidParams):
            HGParams([0.25, 0.25], [0.5, 0.75])

    def test_mismatched_lengths_rejected(self):
        with pytest.raises(InvalidParams):
            HGParams([0.25], [0.5, 0.75])


class TestFromExplicit:
    def test_identity_matrices(self):
        ms = from_explicit(np.eye(3), np.eye(3))
        assert np.allclose(ms.minf, np.eye(3))

    def test_cy_64_16_rotation_numbers(self):
        T, S = cy_matrices(64, 16)
        # fully parabolic case: the modulus check is reported, not enforced
        with pytest.warns(UserWarning, match="eigenvalue moduli"):
            ms = from_explicit(T, S)
        args = np.sort(np.angle(np.linalg.eigvals(ms.minf)) / (2 * np.pi))
        # all four eigenvalues are -1: arguments +-1/2 up to branch choice
        assert np.abs(np.abs(args) - 0.5).max() < 1e-3

    def test_singular_product_rejected(self):
        with pytest.raises(SingularMatrix):
            from_explicit(np.diag([1.0, 0.0]), np.eye(2))


class TestVerify:
    def test_build_passes_all_checks(self):
        params = HGParams([0.0], [0.5])
        report = verify(build(params), params)
        assert report.passed
        assert report.rank_m1_minus_id == 1

    def test_n2_example_passes(self):
        params = HGParams([0.0, 0.5], [0.25, 0.75])
        report = verify(build(params), params)
        assert report.passed

    def test_identity_m1_fails_rank_check(self):
        params = HGParams([0.25, 0.5], [0.0, 0.75])
        ms = build(params)
        broken = monodromy.MonodromySet(
            ms.n, ms.m0, np.eye(ms.n, dtype=complex),
            np.linalg.inv(ms.m0), trace=None,
        )
        report = verify(broken, params)
        assert report.rank_m1_minus_id == 0
        assert not report.checks["rank_one"]

    def test_conjugation_invariance(self, rng):
        for _ in range(10):
            params = random_params(rng, 3)
            ms = build(params)
            p = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
            p_inv = np.linalg.inv(p)
            conj = monodromy.MonodromySet(
                 3, p @ ms.m0 @ p_inv, p @ ms.m1 @ p_inv, p @ ms.minf @ p_inv, None)
            a = verify(ms, params)
            b = verify(conj, params, eig_tol=1e-5, relation_tol=1e-6)
            assert a.checks["alpha_eigenvalues"] and b.checks["alpha_eigenvalues"]
            assert a.checks["beta_eigenvalues"] and b.checks["beta_eigenvalues"]
            assert a.rank_m1_minus_id == b.rank_m1_minus_id == 1
