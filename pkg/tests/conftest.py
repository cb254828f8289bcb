"""Shared fixtures: the two standard parameter sets and common quadratures."""

import pytest

from diskwave.model import ModelParams


@pytest.fixture(scope="session")
def case1() -> ModelParams:
    """Consistent reading of the standard first parameter set (d = 0.8)."""
    return ModelParams(d1=0.1, d2=0.2, chi=0.38, alpha=1.0, K=6.0, d=0.8,
                       tau=9.88, R=10.0)


@pytest.fixture(scope="session")
def case1_literal() -> ModelParams:
    """Literal reading (d = 0.1); the uniform state is unstable without delay."""
    return ModelParams(d1=0.1, d2=0.2, chi=0.38, alpha=1.0, K=6.0, d=0.1,
                       tau=9.88, R=10.0)


@pytest.fixture(scope="session")
def case2() -> ModelParams:
    """Consistent reading of the second standard set (chi = 0.46)."""
    return ModelParams(d1=0.1, d2=0.2, chi=0.46, alpha=1.0, K=6.0, d=0.8,
                       tau=9.6, R=10.0)
