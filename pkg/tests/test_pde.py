import numpy as np
import pytest

from srj import (
    AdvectionDiffusionSpec1D,
    AdvectionDiffusionSpec2D,
    build_1d,
    build_2d,
    jacobi_eigenvalues,
)


def dense_1d_oracle(n, nu, a):
    """Brute-force assembly straight from the difference formulas."""
    h = 1.0 / n
    A = np.zeros((n, n))
    b = np.zeros(n)
    for i in range(n):  # unknown i sits at x = (i+1) h
        A[i, i] += 2.0 * nu / h**2
        if i > 0:
            A[i, i - 1] += -nu / h**2
        if i < n - 1:
            A[i, i + 1] += -nu / h**2
        else:
            A[i, i] += -nu / h**2  # ghost reflection u_{n+1} = u_n
        if a > 0:
            A[i, i] += a / h
            if i > 0:
                A[i, i - 1] += -a / h
        elif a < 0:
            A[i, i] += -a / h
            if i < n - 1:
                A[i, i + 1] += a / h
            else:
                A[i, i] += a / h  # ghost reflection on the outflow term
        b[i] = np.sin(2.0 * np.pi * (i + 1) * h)
    return A, b


def test_build_1d_interior_row_values():
    A, _ = build_1d(AdvectionDiffusionSpec1D(n=128, nu=1.0, a=50.0))
    dense = A.to_dense()
    i = 60
    assert dense[i, i - 1] == pytest.approx(-22784.0)
    assert dense[i, i] == pytest.approx(39168.0)
    assert dense[i, i + 1] == pytest.approx(-16384.0)


def test_build_1d_matches_dense_oracle_both_signs():
    for n, nu, a in ((5, 1.0, 7.0), (5, 1.0, -7.0), (12, 0.3, 50.0), (9, 2.0, 0.0)):
        A, b = build_1d(AdvectionDiffusionSpec1D(n=n, nu=nu, a=a))
        oracle_A, oracle_b = dense_1d_oracle(n, nu, a)
        np.testing.assert_allclose(A.to_dense(), oracle_A, atol=1e-9)
        np.testing.assert_allclose(b, oracle_b, atol=1e-15)


def test_build_1d_no_advection_is_symmetric():
    A, _ = build_1d(AdvectionDiffusionSpec1D(n=32, nu=1.0, a=0.0))
    dense = A.to_dense()
    np.testing.assert_array_equal(dense, dense.T)
    h = 1.0 / 32
    assert dense[3, 3] == pytest.approx(2.0 / h**2)
    assert dense[3, 4] == pytest.approx(-1.0 / h**2)


def test_build_1d_negative_advection_mirrors_positive():
    # Flipping the advection sign swaps the one-sided difference to the
    # other neighbor, which transposes the interior stencil.  Boundary
    # rows are excluded: the Dirichlet/Neumann sides stay put.
    n = 5
    forward, _ = build_1d(AdvectionDiffusionSpec1D(n=n, nu=1.0, a=7.0))
    backward, _ = build_1d(AdvectionDiffusionSpec1D(n=n, nu=1.0, a=-7.0))
    np.testing.assert_allclose(
        backward.to_dense()[1:-1, :], forward.to_dense().T[1:-1, :], atol=1e-9
    )


def test_build_1d_interior_row_sums_vanish():
    A, _ = build_1d(AdvectionDiffusionSpec1D(n=16, nu=0.7, a=11.0))
    dense = A.to_dense()
    sums = dense[1:-1].sum(axis=1)
    np.testing.assert_allclose(sums, 0.0, atol=1e-9)


def test_build_1d_diagonal_dominance():
    for a in (0.0, 5.0, 300.0):
        A, _ = build_1d(AdvectionDiffusionSpec1D(n=24, nu=1.0, a=a))
        dense = A.to_dense()
        diag = np.abs(np.diag(dense))
        off = np.abs(dense).sum(axis=1) - diag
        assert np.all(diag >= off - 1e-9)
        assert np.all(diag > 0)


def test_build_1d_validation():
    with pytest.raises(ValueError):
        build_1d(AdvectionDiffusionSpec1D(n=2, nu=1.0, a=0.0))
    with pytest.raises(ValueError):
        build_1d(AdvectionDiffusionSpec1D(n=8, nu=0.0, a=0.0))
    with pytest.raises(ValueError):
        build_1d(AdvectionDiffusionSpec1D(n=8, nu=1.0, a=0.0, forcing="nope"))


def test_refinement_drives_jacobi_radius_to_one():
    radii = []
    for n in (8, 16, 32, 64):
        A, _ = build_1d(AdvectionDiffusionSpec1D(n=n, nu=1.0, a=0.0))
        radii.append(np.abs(jacobi_eigenvalues(A)).max())
    assert all(b > a for a, b in zip(radii, radii[1:]))
    assert radii[-1] < 1.0


def dense_2d_oracle(nx, ny, nu, ax, ay):
    hx, hy = 1.0 / nx, 1.0 / ny
    N = nx * ny
    A = np.zeros((N, N))
    for j in range(ny):
        for i in range(nx):
            k = j * nx + i
            A[k, k] += 2 * nu / hx**2 + 2 * nu / hy**2 + abs(ax) / hx + abs(ay) / hy
            west = -nu / hx**2 - max(ax, 0.0) / hx
            east = -nu / hx**2 + min(ax, 0.0) / hx
            south = -nu / hy**2 - max(ay, 0.0) / hy
            north = -nu / hy**2 + min(ay, 0.0) / hy
            if i > 0:
                A[k, k - 1] += west
            if i < nx - 1:
                A[k, k + 1] += east
            else:
                A[k, k] += east
            if j > 0:
                A[k, k - nx] += south
            if j < ny - 1:
                A[k, k + nx] += north
            else:
                A[k, k] += north
    return A


def test_build_2d_laplacian_matches_dense_oracle():
    A, b = build_2d(AdvectionDiffusionSpec2D(nx=3, ny=3, nu=1.0, ax=0.0, ay=0.0))
    np.testing.assert_allclose(A.to_dense(), dense_2d_oracle(3, 3, 1.0, 0.0, 0.0), atol=1e-9)
    assert len(b) == 9


def test_build_2d_advective_matches_dense_oracle():
    for nx, ny, ax, ay in ((4, 3, 9.0, 5.0), (3, 5, -9.0, 5.0), (4, 4, 7.0, -2.0)):
        A, _ = build_2d(AdvectionDiffusionSpec2D(nx=nx, ny=ny, nu=0.5, ax=ax, ay=ay))
        np.testing.assert_allclose(A.to_dense(), dense_2d_oracle(nx, ny, 0.5, ax, ay), atol=1e-9)


def test_build_2d_diagonal_value():
    A, _ = build_2d(AdvectionDiffusionSpec2D(nx=256, ny=256, nu=1.0, ax=250.0, ay=250.0))
    interior = 130 * 256 + 130
    diag = A.diagonal()
    assert diag[interior] == pytest.approx(4 * 256**2 + 2 * 250 * 256)


def test_build_2d_no_advection_is_symmetric():
    A, _ = build_2d(AdvectionDiffusionSpec2D(nx=5, ny=4, nu=1.0, ax=0.0, ay=0.0))
    dense = A.to_dense()
    np.testing.assert_array_equal(dense, dense.T)


def test_build_2d_zero_forcing_gives_zero_rhs():
    spec = AdvectionDiffusionSpec2D(nx=4, ny=4, nu=1.0, ax=1.0, ay=1.0, forcing=lambda x, y: x * 0 + y * 0)
    A, b = build_2d(spec)
    np.testing.assert_array_equal(b, np.zeros(16))
    from srj import residual_norm

    assert residual_norm(A, np.zeros(16), b) == 0.0


def test_build_2d_validation():
    with pytest.raises(ValueError):
        build_2d(AdvectionDiffusionSpec2D(nx=2, ny=4, nu=1.0, ax=0.0, ay=0.0))
    with pytest.raises(ValueError):
        build_2d(AdvectionDiffusionSpec2D(nx=4, ny=4, nu=-1.0, ax=0.0, ay=0.0))
