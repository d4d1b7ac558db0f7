import itertools
import math

import numpy as np
import pytest

from kappanull.models import MilnorTriple
from kappanull.services import InputError
from kappanull.services.model_catalog import (
    ABELIAN,
    E11,
    E2,
    MILNOR_CATALOG,
    NIL3,
    NON_UNIMODULAR,
    SL2,
    SU2,
    perrone_theta,
)
from kappanull.utils.linalg import max_principal_angle

T_AXIS = np.array([[1.0], [0.0], [0.0]])


def triple(l1, l2, l3):
    return MilnorTriple(lambda1=l1, lambda2=l2, lambda3=l3)


class TestClassification:
    @pytest.mark.parametrize(
        "values, expected",
        [
            ((0.0, 0.0, 0.0), ABELIAN),
            ((1.0, 0.0, 0.0), NIL3),
            ((2.0, 2.0, 2.0), SU2),
            ((2.0, 1.0, 1.0), SU2),
            ((2.0, -1.0, -1.0), SL2),
            ((0.0, -1.0, 1.0), E11),
            ((1.0, 1.0, 0.0), E2),
            ((-2.0, -1.0, -1.0), SU2),
            ((0.0, -1.0, -1.0), E2),
        ],
    )
    def test_sign_patterns(self, catalog, values, expected):
        assert catalog.classify_unimodular(triple(*values)) == expected

    @pytest.mark.parametrize("values", [(2.0, -1.0, -1.0), (0.0, -1.0, 1.0), (1.0, 2.0, 0.0), (3.0, 0.0, 0.0)])
    def test_permutation_and_global_flip(self, catalog, values):
        label = catalog.classify_unimodular(triple(*values))
        for perm in itertools.permutations(values):
            assert catalog.classify_unimodular(triple(*perm)) == label
            assert catalog.classify_unimodular(triple(*(-v for v in perm))) == label

    def test_from_algebra(self, catalog):
        assert catalog.classify(catalog.catalog("sl2-sasakian")) == SL2
        assert catalog.classify(catalog.catalog("e11")) == E11
        assert catalog.classify(catalog.catalog("perrone")) == NON_UNIMODULAR

    def test_needs_three_dimensions(self, catalog):
        with pytest.raises(InputError):
            catalog.classify(catalog.catalog("nul1-4"))


class TestMilnorReport:
    def test_round_sphere(self, catalog):
        report = catalog.milnor_report(triple(2.0, 2.0, 2.0))
        assert report["group"] == SU2
        assert report["scal"] == pytest.approx(6.0)
        for value in report["sectional"].values():
            assert value == pytest.approx(1.0)

    def test_frame_planes(self, catalog):
        # K(e_i, e_j) = scal/2 - Ric(e_k) in dimension three
        report = catalog.milnor_report(triple(2.0, 1.0, 1.0))
        assert report["sectional"]["K12"] == pytest.approx(1.0)
        assert report["sectional"]["K13"] == pytest.approx(1.0)
        assert report["sectional"]["K23"] == pytest.approx(-1.0)


class TestTableOne:
    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0, 5.0])
    def test_first_family(self, catalog, theta):
        report = catalog.table_row_check("T1F1", theta)
        assert report.passed, report.flags
        assert report.scal == pytest.approx(2.0, abs=1e-9)
        assert report.plane_curvature == pytest.approx(-1.0, abs=1e-9)
        assert report.group == SU2

    @pytest.mark.parametrize("theta, group", [(-1.0, SL2), (0.0, NIL3), (1.0, SU2)])
    def test_second_family(self, catalog, theta, group):
        report = catalog.table_row_check("T1F2", theta)
        assert report.passed, report.flags
        assert report.group == group
        assert report.scal == pytest.approx(-2.0 + 4.0 * theta, abs=1e-9)
        assert report.plane_curvature == pytest.approx(-3.0 + 2.0 * theta, abs=1e-9)

    def test_homogeneous_splitting(self, catalog):
        report = catalog.table_row_check("T1F2", -1.0)
        assert report.splitting_trace == pytest.approx(0.0, abs=1e-8)
        assert report.splitting_det == pytest.approx(1.0, abs=1e-8)


class TestTableTwo:
    @pytest.mark.parametrize("theta", [0.25, 0.5, 1.0])
    def test_rows(self, catalog, theta):
        report = catalog.table_row_check("T2", theta)
        assert report.passed, report.flags
        assert report.scal == pytest.approx(-2.0, abs=1e-9)
        assert report.plane_curvature == pytest.approx(1.0, abs=1e-9)
        assert report.group == (E11 if theta == 1.0 else SL2)
        assert any(abs(k + 1.0) <= 1e-6 for k in report.detected_kappas)

    @pytest.mark.parametrize("family, theta", [("T2", 0.0), ("T2", 1.5), ("T1F1", -1.0), ("T3", 1.0)])
    def test_invalid_rows(self, catalog, family, theta):
        with pytest.raises(InputError):
            catalog.table_row_check(family, theta)


class TestConullityTwo:
    @pytest.mark.parametrize("F, group", [(0.0, E11), (1.0, SL2), (-0.5, SL2)])
    def test_frame_family(self, catalog, lie_metric, nullity_solver, F, group):
        space = catalog.conullity2_frame(F)
        assert lie_metric.validate_algebra(space).passed
        assert catalog.classify(space) == group

        curv = lie_metric.curvature(space)
        assert curv.scal == pytest.approx(-2.0, abs=1e-10)
        nullity = nullity_solver.nullity_index(curv, -1.0)
        assert nullity.index == 1
        assert max_principal_angle(nullity.basis, T_AXIS) <= 1e-7
        assert catalog.plane_curvature(curv, nullity) == pytest.approx(1.0, abs=1e-10)

    def test_plane_curvature_needs_two_dimensions(self, catalog, lie_metric, nullity_solver):
        curv = lie_metric.curvature(catalog.catalog("su2"))
        with pytest.raises(InputError):
            catalog.plane_curvature(curv, nullity_solver.nullity_index(curv, 1.0))


class TestPerrone:
    @pytest.mark.parametrize("alpha", [1.0, math.sqrt(2.0), 2.0])
    def test_isometric_to_milnor_metric(self, catalog, lie_metric, nullity_solver, alpha):
        theta = perrone_theta(alpha)
        perrone = lie_metric.curvature(catalog.perrone_algebra(alpha))
        milnor = lie_metric.curvature(catalog.milnor_algebra(triple(2.0, theta, theta)))
        assert perrone.scal == pytest.approx(milnor.scal, abs=1e-10)

        perrone_nullity = nullity_solver.nullity_index(perrone, 1.0)
        milnor_nullity = nullity_solver.nullity_index(milnor, 1.0)
        assert perrone_nullity.index == milnor_nullity.index == 1
        assert catalog.plane_curvature(perrone, perrone_nullity) == pytest.approx(
            catalog.plane_curvature(milnor, milnor_nullity), abs=1e-10
        )

    def test_unit_alpha(self, catalog, lie_metric):
        assert lie_metric.curvature(catalog.catalog("perrone")).scal == pytest.approx(-4.0, abs=1e-10)

    def test_not_unimodular(self, catalog, lie_metric):
        assert not lie_metric.is_unimodular(catalog.perrone_algebra(2.0))

    def test_zero_alpha(self, catalog):
        with pytest.raises(InputError):
            catalog.perrone_algebra(0.0)


class TestCatalog:
    @pytest.mark.parametrize("name", sorted(MILNOR_CATALOG) + ["perrone", "conullity2", "nul1-4"])
    def test_entries_are_valid(self, catalog, lie_metric, name):
        assert lie_metric.validate_algebra(catalog.catalog(name)).passed

    def test_example5_entry(self, catalog):
        space = catalog.catalog("example5")
        assert space.dim == 5

    def test_case_insensitive(self, catalog):
        assert catalog.catalog(" SU2 ").label == "su2"

    @pytest.mark.parametrize("name", ["sphere", "nul1-x", "nul1-3"])
    def test_unknown(self, catalog, name):
        with pytest.raises(InputError):
            catalog.catalog(name)
