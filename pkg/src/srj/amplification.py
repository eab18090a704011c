"""Amplification polynomials of scheduled relaxation Jacobi cycles.

A cycle of M relaxed Jacobi sweeps with factors ``w_1 .. w_M`` multiplies
each error mode by ``G(lam) = prod_i [(1 - w_i) + w_i * lam]``, where
``lam`` is an eigenvalue of the Jacobi iteration matrix.  This module
evaluates those polynomials, builds the analytic real-axis schemes whose
amplification is a rescaled Chebyshev polynomial, and exposes the two
constants (``lambda_star``, ``lambda_max``) that define the rescaling.
"""

import math
from dataclasses import dataclass

import numpy as np

# The analytic real-axis schemes pin max |G| to 1/BOUNDING_RATIO on the
# target interval [-1, lambda_max].
BOUNDING_RATIO = 3.0


def cheb_eval(m, x):
    """Evaluate the Chebyshev polynomial of the first kind, T_m(x).

    Uses the three-term recurrence for ``|x| <= 1`` and the hyperbolic
    closed form ``cosh(m*acosh(|x|))`` outside, where the recurrence
    amplifies round-off for large m.  Both branches agree at ``|x| = 1``.
    """
    if m < 0:
        raise ValueError(f"polynomial order must be nonnegative, got {m}")
    if abs(x) > 1.0:
        value = math.cosh(m * math.acosh(abs(x)))
        return -value if (x < 0.0 and m % 2) else value
    if m == 0:
        return 1.0
    t_prev, t = 1.0, x
    for _ in range(m - 1):
        t_prev, t = t, 2.0 * x * t - t_prev
    return t


def lambda_star(m):
    """Abscissa where T_m reaches the bounding ratio: T_m(lambda_star) = 3.

    Closed form ``cosh(acosh(3)/m)``; exact for every order, no root
    finding required.
    """
    if m < 1:
        raise ValueError(f"order must be >= 1, got {m}")
    return math.cosh(math.acosh(BOUNDING_RATIO) / m)


def lambda_max(m):
    """Largest Jacobi eigenvalue whose amplification stays within 1/3.

    Image of the Chebyshev interval endpoint +1 under the inverse of the
    affine rescaling; equals ``(3 - lambda_star) / (1 + lambda_star)``.
    """
    ls = lambda_star(m)
    return (BOUNDING_RATIO - ls) / (1.0 + ls)


def to_cheb_interval(lam, m):
    """Affine map sending [-1, lambda_max(m)] onto the Chebyshev [-1, 1]."""
    ls = lambda_star(m)
    return ((ls + 1.0) * lam + (ls - 1.0)) / 2.0


def from_cheb_interval(t, m):
    """Inverse of :func:`to_cheb_interval`; maps -1 to -1 exactly."""
    ls = lambda_star(m)
    return (2.0 * t + (1.0 - ls)) / (1.0 + ls)


@dataclass(frozen=True)
class ChebyshevConstants:
    """The rescaling constants attached to a cycle length."""

    m: int
    lambda_star: float
    lambda_max: float


def chebyshev_constants(m):
    return ChebyshevConstants(m=m, lambda_star=lambda_star(m), lambda_max=lambda_max(m))


@dataclass(frozen=True)
class Scheme:
    """An ordered cycle of relaxation factors.

    ``factors`` is kept in application order (the order sweeps are run);
    amplification values are order-independent in exact arithmetic, so
    reordering only perturbs round-off.  ``c_ratio`` records the ellipse
    aspect ratio the scheme was optimized for (None for ad-hoc schemes)
    and ``g_bar`` the certified amplification bound, when known.
    """

    factors: tuple
    c_ratio: float | None = None
    g_bar: float | None = None

    def __post_init__(self):
        factors = tuple(float(w) for w in self.factors)
        if not factors:
            raise ValueError("scheme needs at least one relaxation factor")
        for w in factors:
            if not math.isfinite(w) or w <= 0.0:
                raise ValueError(f"relaxation factors must be positive and finite, got {w}")
        object.__setattr__(self, "factors", factors)
        if self.c_ratio is not None and not 0.0 <= self.c_ratio <= 1.0:
            raise ValueError(f"c_ratio must lie in [0, 1], got {self.c_ratio}")
        if self.g_bar is not None:
            if not 0.0 <= self.g_bar < 1.0:
                raise ValueError(f"g_bar must lie in [0, 1), got {self.g_bar}")

    @property
    def m(self):
        return len(self.factors)


def chebyshev_scheme(m):
    """Analytic real-axis scheme of length m (ellipse ratio 0).

    The amplification polynomial must vanish at the images of the
    Chebyshev roots under the interval rescaling; each root ``r`` of the
    amplification fixes one factor through ``w = 1 / (1 - r)``.  The
    resulting amplification equals ``T_m`` rescaled by 1/3 on
    ``[-1, lambda_max(m)]``.
    """
    roots = (math.cos((2 * i - 1) * math.pi / (2 * m)) for i in range(1, m + 1))
    factors = tuple(1.0 / (1.0 - from_cheb_interval(r, m)) for r in roots)
    return Scheme(factors=factors, c_ratio=0.0, g_bar=1.0 / BOUNDING_RATIO)


def amp_eval(scheme, lam):
    """Evaluate the cycle amplification ``prod_i [(1 - w_i) + w_i * lam]``.

    ``lam`` may be a scalar or an ndarray, real or complex; factors are
    multiplied sequentially in application order.
    """
    result = np.multiply(lam, 0) + 1.0
    for w in scheme.factors:
        result = result * ((1.0 - w) + w * lam)
    return result


def slope_at_one(scheme):
    """Derivative of the amplification at lam = 1.

    Every linear factor equals 1 there, so the product rule collapses to
    the sum of the relaxation factors.  Larger slope means faster
    attenuation of near-1 (stiff) eigenvalues.
    """
    return math.fsum(scheme.factors)


def amp_grid(scheme, x_range, y_range, resolution):
    """Sample |amplification| on a rectangular grid of complex inputs.

    ``resolution`` is the number of samples per axis (one int for both,
    or an ``(nx, ny)`` pair).  Returns an ``(ny, nx)`` array, row-major
    over y then x, ready for CSV export.
    """
    nx, ny = (resolution, resolution) if np.isscalar(resolution) else resolution
    if nx < 2 or ny < 2:
        raise ValueError("resolution must be >= 2 per axis")
    x_lo, x_hi = map(float, x_range)
    y_lo, y_hi = map(float, y_range)
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError("ranges must be nonempty with lo < hi")
    xs = np.linspace(x_lo, x_hi, nx)
    ys = np.linspace(y_lo, y_hi, ny)
    grid = xs[None, :] + 1j * ys[:, None]
    return np.abs(amp_eval(scheme, grid))
