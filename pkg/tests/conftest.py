import pytest

from qpswf import build_basis


@pytest.fixture(scope="session")
def basis36():
    """Canonical T = W = 1 basis used across the suite."""
    return build_basis(1.0, 1.0, 256, 36)


@pytest.fixture(scope="session")
def basis_small():
    """Cheap basis for structural tests."""
    return build_basis(1.0, 1.0, 128, 6)
