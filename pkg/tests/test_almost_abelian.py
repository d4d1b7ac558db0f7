import numpy as np
import pytest
from numpy.testing import assert_allclose

from kappanull.models import AlmostAbelianGroup
from kappanull.services import AlmostAbelianService, FlatGroupError, InputError, NullitySolverService
from kappanull.services.almost_abelian import GOLDEN_LOG
from kappanull.utils import dumps_report
from kappanull.utils.linalg import max_principal_angle


def group(A):
    return AlmostAbelianGroup(A=A)


def unit(n, i):
    v = np.zeros((n, 1))
    v[i, 0] = 1.0
    return v


class TestCurvature:
    def test_hyperbolic_plane_type(self, almost_abelian, lie_metric):
        curv = almost_abelian.aa_curvature(group(np.diag([1.0, -1.0])))
        assert curv.scal == pytest.approx(-2.0, abs=1e-12)
        assert lie_metric.sectional_curvature(curv, [0, 1, 0], [0, 0, 1]) == pytest.approx(1.0, abs=1e-12)
        assert lie_metric.sectional_curvature(curv, [1, 0, 0], [0, 1, 0]) == pytest.approx(-1.0, abs=1e-12)

    def test_skew_matrix_is_flat(self, almost_abelian):
        curv = almost_abelian.aa_curvature(group([[0.0, -1.0], [1.0, 0.0]]))
        assert np.max(np.abs(curv.riem)) == 0.0

    def test_balanced_diagonal(self, almost_abelian):
        curv = almost_abelian.aa_curvature(group(np.diag([1.0, 1.0, -1.0, -1.0])))
        assert curv.ricci[0, 0] == pytest.approx(-4.0)
        assert curv.scal == pytest.approx(-4.0)

    def test_matches_koszul_pipeline(self, almost_abelian, lie_metric, rng):
        for trial in range(20):
            m = 1 + trial % 5
            A = rng.uniform(-1.0, 1.0, (m, m))
            g = group(A)
            closed = almost_abelian.aa_curvature(g)
            generic = lie_metric.curvature(almost_abelian.to_lie_metric(g))
            assert np.max(np.abs(closed.riem - generic.riem)) <= 1e-10
            assert closed.scal == pytest.approx(generic.scal, abs=1e-10)

    def test_ricci_in_symmetric_eigenbasis(self, almost_abelian, rng):
        for trial in range(6):
            lam = rng.uniform(-1.0, 1.0, 4)
            if trial % 2:
                lam -= lam.mean()
            skew = rng.uniform(-1.0, 1.0, (4, 4))
            skew = skew - skew.T
            curv = almost_abelian.aa_curvature(group(np.diag(lam) + skew))
            assert_allclose(curv.ricci[0, 1:], 0.0, atol=1e-10)
            assert curv.ricci[0, 0] == pytest.approx(-np.sum(lam ** 2), abs=1e-10)
            # <A_sk X_i, X_j> is the (j, i) entry of the skew part
            K = skew
            expected = (lam[:, None] - lam[None, :]) * K.T - np.diag(lam * lam.sum())
            assert_allclose(curv.ricci[1:, 1:], expected, atol=1e-10)
            assert curv.scal == pytest.approx(-np.sum(lam ** 2) - lam.sum() ** 2, abs=1e-10)

    def test_non_unimodular_ricci(self, almost_abelian, lie_metric):
        g = group([[1.0, -0.5], [0.5, 2.0]])
        curv = almost_abelian.aa_curvature(g)
        assert_allclose(curv.ricci, [[-5.0, 0.0, 0.0], [0.0, -3.0, -0.5], [0.0, -0.5, -6.0]], atol=1e-12)
        assert curv.scal == pytest.approx(-14.0, abs=1e-12)
        assert lie_metric.curvature(almost_abelian.to_lie_metric(g)).scal == pytest.approx(-14.0, abs=1e-10)


class TestNullity:
    @pytest.mark.parametrize(
        "A",
        [
            np.diag([1.0, 0.0, 0.0]),
            [[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
            [[1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            np.diag([1.0, 1.0, -1.0, -1.0]),
        ],
    )
    def test_agrees_with_solver(self, almost_abelian, lie_metric, nullity_solver, A):
        g = group(A)
        closed = almost_abelian.aa_nullity(g)
        solved = nullity_solver.nullity_index(lie_metric.curvature(almost_abelian.to_lie_metric(g)), 0.0)
        assert closed.index == solved.index
        if closed.index:
            assert max_principal_angle(closed.basis, solved.basis) <= 1e-7

    def test_diagonal_kernel(self, almost_abelian):
        assert almost_abelian.aa_nullity(group(np.diag([1.0, 0.0, 0.0]))).index == 2

    def test_skew_part_removes_direction(self, almost_abelian):
        result = almost_abelian.aa_nullity(group([[1.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]))
        assert result.index == 1
        assert max_principal_angle(result.basis, unit(4, 3)) <= 1e-10

    def test_invertible_symmetric_part(self, almost_abelian):
        assert almost_abelian.aa_nullity(group(np.diag([1.0, 1.0, -1.0, -1.0]))).index == 0

    def test_flat_group(self, almost_abelian):
        with pytest.raises(FlatGroupError):
            almost_abelian.aa_nullity(group([[0.0, -1.0], [1.0, 0.0]]))


class TestMatrixJson:
    def test_parse(self, almost_abelian):
        g = almost_abelian.from_matrix_json({"m": 2, "A": [[1, 0], [0, -1]]})
        assert g.m == 2
        assert almost_abelian.to_matrix_json(g) == {"m": 2, "A": [[1.0, 0.0], [0.0, -1.0]]}

    @pytest.mark.parametrize(
        "data",
        [
            {"m": 3, "A": [[1, 0], [0, -1]]},
            {"A": [[1, 0, 0], [0, 1, 0]]},
            {"A": [[0, 0], [0, 0]]},
            {"m": 2},
        ],
    )
    def test_invalid(self, almost_abelian, data):
        with pytest.raises(InputError):
            almost_abelian.from_matrix_json(data)


class TestCharpoly:
    def test_identity(self, almost_abelian):
        assert almost_abelian.charpoly(np.eye(2)) == [1.0, -2.0, 1.0]

    def test_diagonal(self, almost_abelian):
        assert almost_abelian.charpoly(np.diag([1.0, -1.0])) == [1.0, 0.0, -1.0]

    def test_integer_matrix_is_exact(self, almost_abelian):
        from kappanull.services.almost_abelian import EXAMPLE5_C

        coefficients = almost_abelian.charpoly(EXAMPLE5_C)
        assert coefficients[0] == 1.0
        assert coefficients[-1] == pytest.approx(np.linalg.det(EXAMPLE5_C))
        assert all(c == round(c) for c in coefficients)

    def test_not_square(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.charpoly(np.ones((2, 3)))


class TestIntegrality:
    def test_golden_witness(self, almost_abelian):
        result = almost_abelian.integrality_check(np.diag([1.0, 1.0, -1.0, -1.0]), GOLDEN_LOG)
        assert result.passed
        assert result.coefficients == [1, -6, 11, -6, 1]

    def test_golden_witness_plane(self, almost_abelian):
        result = almost_abelian.integrality_check(np.diag([1.0, -1.0]), GOLDEN_LOG)
        assert result.passed
        assert result.coefficients == [1, -3, 1]
        assert result.determinant == pytest.approx(1.0)

    def test_generic_scale_fails(self, almost_abelian):
        assert not almost_abelian.integrality_check(np.diag([1.0, -1.0]), 0.3).passed

    def test_linear_mode(self, almost_abelian):
        result = almost_abelian.integrality_check(np.diag([1.0, -1.0]), 2.0, mode="linear")
        assert result.passed
        assert result.coefficients == [1, 0, -4]

    def test_linear_needs_non_nilpotent(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.integrality_check([[0.0, 1.0], [0.0, 0.0]], 1.0, mode="linear")

    def test_linear_rejects_conjugated_jordan_block(self, almost_abelian, rng):
        P = np.eye(6) + 0.1 * rng.uniform(-1.0, 1.0, (6, 6))
        A = P @ np.eye(6, k=1) @ np.linalg.inv(P)
        assert almost_abelian.is_nilpotent(A, 1e-6)
        with pytest.raises(InputError):
            almost_abelian.integrality_check(A, 1.0, mode="linear")

    def test_nilpotency_is_scale_free(self, almost_abelian):
        assert not almost_abelian.is_nilpotent(1e-9 * np.diag([1.0, -1.0]), 1e-6)
        assert almost_abelian.is_nilpotent(np.zeros((3, 3)), 1e-6)

    def test_linear_needs_trace_free(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.integrality_check(np.diag([1.0, 2.0]), 1.0, mode="linear")

    def test_zero_scale(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.integrality_check(np.diag([1.0, -1.0]), 0.0)

    def test_unknown_mode(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.integrality_check(np.diag([1.0, -1.0]), 1.0, mode="cubic")


class TestLatticeSearch:
    def test_plane(self, almost_abelian):
        found = almost_abelian.lattice_lambda_search(np.diag([1.0, -1.0]), 5)
        assert any(abs(lam - GOLDEN_LOG) <= 1e-9 for lam in found)
        assert any(abs(lam + GOLDEN_LOG) <= 1e-9 for lam in found)
        assert found == sorted(found)

    def test_balanced_four(self, almost_abelian):
        found = almost_abelian.lattice_lambda_search(np.diag([1.0, 1.0, -1.0, -1.0]), 7)
        assert any(abs(lam - GOLDEN_LOG) <= 1e-9 for lam in found)

    def test_every_candidate_is_verified(self, almost_abelian):
        A = np.diag([1.0, -1.0])
        for lam in almost_abelian.lattice_lambda_search(A, 6):
            assert almost_abelian.integrality_check(A, lam).passed

    def test_rejects_non_unimodular(self, almost_abelian):
        with pytest.raises(InputError):
            almost_abelian.lattice_lambda_search(np.diag([1.0, 1.0]), 5)

    def test_rejects_conjugated_jordan_block(self, almost_abelian, rng):
        P = np.eye(6) + 0.1 * rng.uniform(-1.0, 1.0, (6, 6))
        with pytest.raises(InputError):
            almost_abelian.lattice_lambda_search(P @ np.eye(6, k=1) @ np.linalg.inv(P), 5)


class TestExample5:
    @pytest.fixture(scope="class")
    def report(self, almost_abelian):
        return almost_abelian.construct_example5()

    def test_log_spectral_data(self, report):
        assert report.alpha == pytest.approx(0.308331705259228, abs=1e-12)
        assert report.beta == pytest.approx(0.511771071975814, abs=1e-12)
        assert report.gamma == pytest.approx(1.86110020668199, abs=1e-12)

    def test_matches_nine_digit_values(self, report):
        # these nine-digit values are only accurate to about 1e-5
        assert report.alpha == pytest.approx(0.308333405, abs=1e-5)
        assert report.beta == pytest.approx(0.511773474, abs=1e-5)
        assert report.gamma == pytest.approx(1.861109547, abs=1e-5)

    def test_matrix(self, report):
        assert report.charpoly_deviation <= 1e-9
        assert abs(report.trace_A) <= 1e-12
        assert report.a > 0.0
        assert report.mu > 0.0 and report.nu < 0.0

    def test_nullity_along_x2(self, report):
        assert report.nullity_index == 1
        assert report.nullity_angle_to_X2 <= 1e-7
        assert np.linalg.norm(report.splitting_vector) > 1e-12

    def test_lattice(self, report):
        assert report.lattice.passed
        assert report.lattice.coefficients[-1] in (1, -1)

    def test_deterministic(self, almost_abelian, report):
        assert dumps_report(almost_abelian.construct_example5()) == dumps_report(report)


class TestNul1Group:
    def test_four(self, almost_abelian):
        report = almost_abelian.nul1_group(4)
        assert report.witness_matches
        assert report.expected_coefficients == [1, -6, 11, -6, 1]
        assert report.nullity.index == 1
        assert report.nullity_ok
        assert report.scal == pytest.approx(-4.0)

    def test_two(self, almost_abelian):
        report = almost_abelian.nul1_group(2)
        assert report.scal == pytest.approx(-2.0)
        assert report.witness.coefficients == [1, -3, 1]
        assert report.nullity_ok

    def test_nullity_mismatch_is_recorded(self, settings, lie_metric, monkeypatch):
        solver = NullitySolverService(settings)
        original = solver.nullity_index
        monkeypatch.setattr(solver, "nullity_index", lambda curv, kappa, tol=None: original(curv, 0.5, tol))
        report = AlmostAbelianService(lie_metric, solver, settings).nul1_group(4)
        assert report.witness_matches
        assert report.nullity.index == 0
        assert not report.nullity_ok

    @pytest.mark.parametrize("m", [0, 3, 5])
    def test_invalid_dimension(self, almost_abelian, m):
        with pytest.raises(InputError):
            almost_abelian.nul1_group(m)

    def test_scan_detects_minus_one(self, almost_abelian, lie_metric, nullity_solver):
        g = AlmostAbelianGroup(A=np.diag([1.0, 1.0, -1.0, -1.0]))
        curv = lie_metric.curvature(almost_abelian.to_lie_metric(g))
        scan = nullity_solver.kappa_scan(curv, np.linspace(-2.0, 2.0, 81))
        assert any(abs(k + 1.0) <= 1e-6 for k in scan.detected)
        assert nullity_solver.nullity_index(curv, -1.0).index == 1
