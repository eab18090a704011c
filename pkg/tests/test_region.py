import numpy as np
import pytest

from srj import ellipse_test_points, lambda_max, make_region, real_test_points


def test_make_region_m2_real_segment():
    region = make_region(2, 0.0)
    assert region.a == pytest.approx(0.82845, abs=5e-5)
    assert region.b == 0.0
    assert region.x_c == pytest.approx(-0.17157, abs=5e-5)


def test_make_region_m1():
    region = make_region(1, 0.0)
    assert region.a == pytest.approx(0.5, abs=1e-12)
    assert region.b == 0.0
    assert region.x_c == pytest.approx(-0.5, abs=1e-12)


def test_make_region_semi_minor_scaling():
    region = make_region(2, 0.5)
    assert region.b == pytest.approx(0.41423, abs=5e-5)
    assert region.b == 0.5 * region.a


def test_make_region_matches_formulas_and_vertices():
    for m in (1, 2, 3, 5, 12, 20):
        for c in (0.0, 0.1, 0.5, 1.0):
            region = make_region(m, c)
            lm = lambda_max(m)
            assert abs(region.a - (lm + 1.0) / 2.0) <= 1e-14
            assert abs(region.b - c * (lm + 1.0) / 2.0) <= 1e-14
            assert abs(region.x_c - (lm - 1.0) / 2.0) <= 1e-14
            assert region.x_c - region.a == -1.0
            assert region.x_c + region.a == pytest.approx(lm, abs=1e-15)
            assert (region.b == 0.0) == (c == 0.0)


def test_make_region_rejects_bad_ratio():
    with pytest.raises(ValueError):
        make_region(3, -0.1)
    with pytest.raises(ValueError):
        make_region(3, 1.2)


def test_make_region_monotone_in_m_and_c():
    semi_major = [make_region(m, 0.2).a for m in range(1, 12)]
    assert all(b > a for a, b in zip(semi_major, semi_major[1:]))
    semi_minor = [make_region(4, c).b for c in (0.0, 0.1, 0.2, 1 / 3, 0.5)]
    assert all(b > a for a, b in zip(semi_minor, semi_minor[1:]))


def test_real_test_points_m2():
    points = real_test_points(2)
    np.testing.assert_allclose(points, [0.65685, -0.17157, -1.0], atol=5e-5)


def test_real_test_points_m1():
    points = real_test_points(1)
    assert points[0] == pytest.approx(0.0, abs=1e-12)
    assert points[1] == -1.0


def test_real_test_points_structure():
    for m in range(1, 21):
        points = real_test_points(m)
        assert len(points) == m + 1
        assert points[-1] == -1.0  # endpoint maps to -1 exactly
        assert points[0] == pytest.approx(lambda_max(m), abs=1e-14)
        assert all(b < a for a, b in zip(points, points[1:]))


def test_ellipse_test_points_m2_half():
    points = ellipse_test_points(make_region(2, 0.5))
    expected = [0.65685, -1.0, complex(-0.17157, 0.41423), complex(-0.17157, -0.41423)]
    assert len(points) == 4
    np.testing.assert_allclose(sorted(points.real), sorted(np.real(expected)), atol=5e-5)
    np.testing.assert_allclose(sorted(points.imag), sorted(np.imag(expected)), atol=5e-5)


def test_ellipse_test_points_counts_and_conjugate_closure():
    for m, c in ((2, 0.5), (5, 0.1), (9, 1 / 3), (20, 1.0)):
        points = ellipse_test_points(make_region(m, c))
        assert len(points) == 2 * m
        point_set = {(round(z.real, 12), round(z.imag, 12)) for z in points}
        conjugates = {(re, -im) for re, im in point_set}
        assert point_set == conjugates


def test_ellipse_test_points_on_boundary():
    for m, c in ((2, 0.5), (5, 0.1), (7, 1 / 3), (13, 0.9)):
        region = make_region(m, c)
        points = ellipse_test_points(region)
        residual = ((points.real - region.x_c) / region.a) ** 2 + (points.imag / region.b) ** 2 - 1.0
        assert np.abs(residual).max() < 1e-10


def test_ellipse_endpoints_have_exactly_zero_imaginary_part():
    points = ellipse_test_points(make_region(5, 0.1))
    reals = points[np.abs(points.imag) == 0.0]
    assert len(reals) == 2
    assert set(np.round(reals.real, 6)) == {round(lambda_max(5), 6), -1.0}


def test_ellipse_test_points_reject_degenerate_region():
    with pytest.raises(ValueError):
        ellipse_test_points(make_region(4, 0.0))
