import pytest

from srj import AdvectionDiffusionSpec1D, build_1d, jacobi_eigenvalues, lookup

M5_C_KEYS = ("0", "1/10", "1/5", "1/3", "1/2")


@pytest.fixture(scope="session")
def m5_schemes():
    return {key: lookup(5, key) for key in M5_C_KEYS}


@pytest.fixture(scope="session")
def system_1d_n128():
    """1D systems and Jacobi spectra for the advection values the tests reuse."""

    cache = {}

    def get(a):
        if a not in cache:
            A, b = build_1d(AdvectionDiffusionSpec1D(n=128, nu=1.0, a=float(a)))
            cache[a] = (A, b, jacobi_eigenvalues(A))
        return cache[a]

    return get
