import functools

import pytest

from rabi_spectra import BasisSpec, ModelParams, solve_spectrum, validate


@functools.lru_cache(maxsize=None)
def _cached_solve(omega, eta, delta, **basis_kwargs):
    params = validate(ModelParams(omega=omega, eta=eta, delta=delta))
    basis = BasisSpec(**basis_kwargs) if basis_kwargs else BasisSpec()
    return solve_spectrum(params, basis)


@pytest.fixture(scope="session")
def solve():
    """Memoized solver so repeated parameter points cost one diagonalization."""
    return _cached_solve
