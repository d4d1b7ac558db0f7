"""
Shared fixtures
"""
import numpy as np
import pytest

from kappanull.config import Settings
from kappanull.models import AlmostAbelianGroup, MilnorTriple
from kappanull.services import (
    AlmostAbelianService,
    LieMetricService,
    ModelCatalogService,
    NullitySolverService,
    SplittingFlowService,
)


@pytest.fixture(scope="session")
def settings() -> Settings:
    return Settings()


@pytest.fixture(scope="session")
def lie_metric(settings) -> LieMetricService:
    return LieMetricService(settings)


@pytest.fixture(scope="session")
def nullity_solver(settings) -> NullitySolverService:
    return NullitySolverService(settings)


@pytest.fixture(scope="session")
def splitting_flow(settings) -> SplittingFlowService:
    return SplittingFlowService(settings)


@pytest.fixture(scope="session")
def almost_abelian(lie_metric, nullity_solver, settings) -> AlmostAbelianService:
    return AlmostAbelianService(lie_metric, nullity_solver, settings)


@pytest.fixture(scope="session")
def catalog(lie_metric, nullity_solver, almost_abelian, settings) -> ModelCatalogService:
    return ModelCatalogService(lie_metric, nullity_solver, almost_abelian, settings)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def random_space(lie_metric, almost_abelian, catalog, rng):
    """Random metric Lie algebras satisfying Jacobi, in a random non-orthonormal frame"""
    def build(trial: int):
        if trial % 2:
            m = 2 + trial % 4
            space = almost_abelian.to_lie_metric(AlmostAbelianGroup(A=rng.uniform(-1.0, 1.0, (m, m))))
        else:
            l1, l2, l3 = rng.uniform(-2.0, 2.0, 3)
            space = catalog.milnor_algebra(MilnorTriple(lambda1=l1, lambda2=l2, lambda3=l3))
        n = space.dim
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        return lie_metric.change_frame(space, Q @ np.diag(rng.uniform(0.5, 2.0, n)))
    return build
