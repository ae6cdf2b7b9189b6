import pytest

from sae_atom.basis import BasisConfig, build_basis


@pytest.fixture(scope="session")
def default_basis():
    return build_basis()


@pytest.fixture(scope="session")
def small_basis():
    return build_basis(BasisConfig(rmax=60.0, n_splines=120, order_k=8))
