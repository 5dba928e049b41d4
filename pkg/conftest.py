"""Shared fixtures for the adiavac test suite."""

from pathlib import Path

import pytest

from src.core.cosmology import (
    ConstantModel,
    DeSitterModel,
    ModeSpec,
    PowerLawModel,
    SplineModel,
    TanhTransitionModel,
)


@pytest.fixture
def minkowski():
    return ConstantModel(A=1.0)


@pytest.fixture
def de_sitter():
    return DeSitterModel(H=0.1)


@pytest.fixture
def tanh_model():
    return TanhTransitionModel(A=2.0, B=1.0, tau=1.0)


@pytest.fixture
def power_law():
    return PowerLawModel(p=0.5, t_offset=1.0)


@pytest.fixture
def unit_mode():
    """Flat slicing, k = 1, m = 1: E = 1 and omega^2 = 2 at a = 1."""
    return ModeSpec(kappa=0, k=1.0, m=1.0)


@pytest.fixture
def knots_csv(tmp_path: Path) -> Path:
    path = tmp_path / "knots.csv"
    path.write_text("t,a\n0,1.0\n1,1.2\n2,1.5\n3,1.9\n4,2.4\n")
    return path


@pytest.fixture
def spline_model(knots_csv):
    return SplineModel.from_csv(knots_csv)
