"""Constrained minimization that produces relaxation schemes.

The minimax problem "minimize the worst amplification over the ellipse"
is solved in its smooth constrained form: minimize ``g_bar**2`` subject
to ``g_bar**2 - |G(z_j)|**2 >= 0`` at every test point ``z_j``, over the
decision vector ``x = (w_1 .. w_m, g_bar)``.  Constraint Jacobians are
analytic (polar decomposition of the complex factor product); constraint
Hessians are 3-point finite differences of the Jacobian.  The driver is
a trust-region interior-point solver.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import Bounds, NonlinearConstraint, minimize

from .amplification import Scheme, chebyshev_scheme
from .region import EllipseRegion, ellipse_test_points, make_region, real_test_points

# Box bounds keep iterates away from the hyperplanes where a factor's
# polar magnitude vanishes; every published factor sits well inside.
# The bound variable itself only needs room for feasible seeding: the
# seed amplification can reach the hundreds on thick ellipses.
FACTOR_BOUNDS = (1e-3, 500.0)
G_BAR_BOUNDS = (0.0, 1e4)

# Aspect ratios at or above this are solved by continuation from the
# next-smaller anchor ratio to dodge bad local minima.
_CONTINUATION_THRESHOLD = 1 / 3
_CONTINUATION_ANCHORS = (1 / 10, 1 / 5, 1 / 3)


class DegenerateFactorError(ArithmeticError):
    """A factor's polar magnitude underflowed; the angle is undefined there."""


@dataclass(frozen=True)
class SolverTolerances:
    kkt_tol: float = 1e-12
    step_tol: float = 1e-14
    max_iters: int = 3000


@dataclass(frozen=True)
class OptimizationProblem:
    """One instance of the constrained minimization."""

    m: int
    region: EllipseRegion
    test_points: np.ndarray
    initial_factors: np.ndarray
    initial_g_bar: float
    tolerances: SolverTolerances = field(default_factory=SolverTolerances)


@dataclass(frozen=True)
class OptimizationResult:
    scheme: Scheme
    g_bar: float
    converged: bool
    iterations: int
    max_constraint_violation: float


def objective(x):
    """Squared amplification bound; the thing being minimized."""
    return x[-1] ** 2


def objective_gradient(x):
    grad = np.zeros_like(x)
    grad[-1] = 2.0 * x[-1]
    return grad


def _objective_hessian(x):
    hess = np.zeros((x.size, x.size))
    hess[-1, -1] = 2.0
    return hess


def _factor_parts(factors, points):
    """Real/imaginary parts of every linear factor at every test point.

    Returns ``(k, m)`` arrays for k points and m factors.
    """
    factors = np.asarray(factors, dtype=float)
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    re = (1.0 - factors)[None, :] + factors[None, :] * points.real[:, None]
    im = factors[None, :] * points.imag[:, None]
    return re, im


def _constraint_values(x, points):
    """Slacks ``g_bar**2 - |G(z_j)|**2`` for every test point, vectorized."""
    re, im = _factor_parts(x[:-1], points)
    return x[-1] ** 2 - np.prod(re * re + im * im, axis=1)


def _constraint_jacobians(x, points):
    """Stacked analytic constraint gradients, one row per test point.

    Writes the factor product in polar form ``G = D* exp(i theta*)`` with
    ``D* = prod C_i`` and ``theta* = sum theta_i``; only the i = j factor
    depends on ``w_j``, so each partial needs one magnitude and one angle
    derivative.  The final entry of every row is ``2 g_bar``.
    """
    points = np.atleast_1d(np.asarray(points, dtype=complex))
    re, im = _factor_parts(x[:-1], points)
    xr = points.real[:, None]
    yi = points.imag[:, None]

    mags = np.hypot(re, im)
    if np.any(mags < 1e-300):
        point_idx, factor_idx = np.unravel_index(int(np.argmin(mags)), mags.shape)
        raise DegenerateFactorError(
            f"factor {factor_idx} has vanishing magnitude at test point "
            f"{points[point_idx]!r}; polar angle undefined"
        )
    angles = np.arctan2(im, re)
    mag_total = np.prod(mags, axis=1)
    angle_total = np.sum(angles, axis=1)

    # Row-wise product of all magnitudes except index j (prefix * suffix).
    k, m = mags.shape
    ones = np.ones((k, 1))
    prefix = np.concatenate((ones, np.cumprod(mags, axis=1)[:, :-1]), axis=1)
    suffix = np.concatenate((np.cumprod(mags[:, ::-1], axis=1)[:, :-1][:, ::-1], ones), axis=1)
    d_mag = (re * (xr - 1.0) + im * yi) / mags * (prefix * suffix)
    # Quotient rule on tan(theta_j) = im/re collapses to yi / C_j**2.
    d_angle = yi / (mags * mags)

    cos_t = np.cos(angle_total)[:, None]
    sin_t = np.sin(angle_total)[:, None]
    re_g = mag_total[:, None] * cos_t
    im_g = mag_total[:, None] * sin_t
    d_re = d_mag * cos_t - im_g * d_angle
    d_im = d_mag * sin_t + re_g * d_angle

    jac = np.empty((k, m + 1))
    jac[:, :m] = -2.0 * re_g * d_re - 2.0 * im_g * d_im
    jac[:, m] = 2.0 * x[-1]
    return jac


def constraint_value(x, z):
    """Slack ``g_bar**2 - |G(z)|**2`` at one test point (feasible when >= 0)."""
    return float(_constraint_values(np.asarray(x, dtype=float), z)[0])


def constraint_jacobian(x, z):
    """Analytic gradient of :func:`constraint_value` in (factors, g_bar)."""
    return _constraint_jacobians(np.asarray(x, dtype=float), z)[0]


def constraint_hessian(x, z, step=1e-6):
    """Symmetrized 3-point finite-difference Hessian of the constraint."""
    x = np.asarray(x, dtype=float)
    n = x.size
    hess = np.empty((n, n))
    for k in range(n):
        shift = np.zeros(n)
        shift[k] = step
        hess[:, k] = (constraint_jacobian(x + shift, z) - constraint_jacobian(x - shift, z)) / (2.0 * step)
    return (hess + hess.T) / 2.0


def make_problem(m, c_ratio, initial_factors=None, initial_g_bar=None, tolerances=None):
    """Assemble the problem for (m, c_ratio) with the default seeding.

    Factors seed from the analytic real-axis scheme unless given.  The
    bound seeds feasible: slightly above the worst amplification of the
    seed factors over the test points (floored at 0.4, which covers the
    thin-ellipse cases).  An infeasible bound guess strands the interior
    point solver when the seed amplification is large on thick ellipses.
    """
    region = make_region(m, c_ratio)
    if c_ratio == 0.0:
        test_points = real_test_points(m).astype(complex)
    else:
        test_points = ellipse_test_points(region)
    if initial_factors is None:
        initial_factors = np.array(chebyshev_scheme(m).factors)
    initial_factors = np.asarray(initial_factors, dtype=float)
    if initial_g_bar is None:
        re, im = _factor_parts(initial_factors, test_points)
        worst = float(np.sqrt(np.prod(re * re + im * im, axis=1).max()))
        initial_g_bar = max(0.4, 1.05 * worst)
    return OptimizationProblem(
        m=m,
        region=region,
        test_points=np.asarray(test_points, dtype=complex),
        initial_factors=initial_factors,
        initial_g_bar=float(initial_g_bar),
        tolerances=tolerances or SolverTolerances(),
    )


def _unique_points(zs):
    """Drop lower-half conjugates; they duplicate value and Jacobian."""
    return np.array([z for z in zs if z.imag >= 0.0])


def _polish(x, zs, lower, upper, max_drift=0.05):
    """Damped-Newton refinement on the fully active system ``c_j(x) = 0``.

    At the optimum every distinct test-point constraint is active (the
    amplification equioscillates), which pins the m+1 unknowns exactly.
    Backtracking keeps the iteration stable on the flat ridges long
    cycles produce.  Returns the refined vector, or None when the
    refinement is not trustworthy (singular system, no progress,
    wandering step, or bound violation).
    """
    unique = _unique_points(zs)
    if unique.size != x.size:
        return None
    start = x.copy()
    x = x.copy()
    for _ in range(60):
        values = _constraint_values(x, unique)
        worst = np.abs(values).max()
        if worst < 1e-14:
            break
        try:
            step = np.linalg.solve(_constraint_jacobians(x, unique), -values)
        except np.linalg.LinAlgError:
            return None
        scale = 1.0
        for _ in range(30):
            trial = x + scale * step
            if np.all(trial[:-1] > 0.0) and np.all(np.isfinite(trial)):
                if np.abs(_constraint_values(trial, unique)).max() < worst * (1.0 - 1e-4 * scale):
                    break
            scale *= 0.5
        else:
            break
        x = x + scale * step
    if np.abs(_constraint_values(x, unique)).max() > 1e-12:
        return None
    drift = np.abs(x - start).max() / (1.0 + np.abs(start).max())
    if drift > max_drift or np.any(x < lower) or np.any(x > upper):
        return None
    return x


# Relative spread fractions tried when splitting coalesced factors apart.
_SPLIT_FRACTIONS = (0.05, 0.1, 0.15, 0.25)


def _coalesced_groups(factors, rel_tol=0.05):
    """Indices of nearly coincident factors, grouped by adjacency."""
    order = np.argsort(factors)[::-1]
    groups = []
    current = [order[0]]
    for prev, idx in zip(order, order[1:]):
        if abs(factors[prev] - factors[idx]) < rel_tol * factors[prev]:
            current.append(idx)
        else:
            if len(current) > 1:
                groups.append(current)
            current = [idx]
    if len(current) > 1:
        groups.append(current)
    return groups


def _split_and_polish(best, zs, lower, upper):
    """Escape a merged-factor ridge by spreading duplicates and re-polishing.

    Long cycles over thick ellipses sometimes stall with two factors
    coalesced; that configuration is nearly as good as the true optimum
    but singular for Newton.  Splitting the pair apart drops the iterate
    into the distinct-root basin.  Only accepted when the refined bound
    is no worse.
    """
    groups = _coalesced_groups(best[:-1])
    if not groups:
        return None
    for split in _SPLIT_FRACTIONS:
        trial = best.copy()
        for group in groups:
            members = sorted(group, key=lambda i: -best[i])
            for rank, idx in enumerate(members):
                spread = split * (1.0 - 2.0 * rank / max(len(members) - 1, 1))
                trial[idx] *= 1.0 + spread
        polished = _polish(trial, zs, lower, upper, max_drift=0.5)
        if polished is not None and polished[-1] <= best[-1] + 1e-9:
            return polished
    return None


def _solve(problem):
    m = problem.m
    zs = problem.test_points
    tols = problem.tolerances

    def fun(x):
        return _constraint_values(x, zs)

    def jac(x):
        return _constraint_jacobians(x, zs)

    def hess(x, v, step=1e-6):
        # 3-point finite difference of the multiplier-weighted Jacobian;
        # one Jacobian pass per coordinate instead of one per test point.
        v = np.asarray(v, dtype=float)
        total = np.empty((m + 1, m + 1))
        for k in range(m + 1):
            shift = np.zeros(m + 1)
            shift[k] = step
            diff = _constraint_jacobians(x + shift, zs) - _constraint_jacobians(x - shift, zs)
            total[:, k] = v @ diff / (2.0 * step)
        return (total + total.T) / 2.0

    lower = np.concatenate((np.full(m, FACTOR_BOUNDS[0]), [G_BAR_BOUNDS[0]]))
    upper = np.concatenate((np.full(m, FACTOR_BOUNDS[1]), [G_BAR_BOUNDS[1]]))
    x0 = np.concatenate((problem.initial_factors, [problem.initial_g_bar]))
    x0 = np.clip(x0, lower, upper)

    constraint = NonlinearConstraint(fun, 0.0, np.inf, jac=jac, hess=hess)
    for attempt in range(3):
        try:
            result = minimize(
                objective,
                x0,
                jac=objective_gradient,
                hess=_objective_hessian,
                method="trust-constr",
                bounds=Bounds(lower, upper),
                constraints=[constraint],
                options={
                    "gtol": tols.kkt_tol,
                    "xtol": tols.step_tol,
                    "barrier_tol": tols.kkt_tol,
                    "maxiter": tols.max_iters,
                },
            )
            break
        except DegenerateFactorError:
            # Nudge off the singular hyperplane and restart; optima never
            # sit on it.
            x0 = x0.copy()
            x0[:m] += 1e-12 * (attempt + 1)
    else:
        raise DegenerateFactorError(f"optimizer kept hitting degenerate factors for m={m}")

    solver_ok = result.status in (1, 2) and result.niter <= tols.max_iters
    best = result.x.copy()
    best[-1] = abs(best[-1])  # only g_bar**2 enters the problem; fix the gauge

    # A successful polish lands on the exact equioscillation solution
    # (all distinct constraints active to round-off), which also rescues
    # runs where the trust-region solver crawled out its budget on a
    # flat ridge.
    polished = _polish(best, zs, lower, upper)
    if polished is None or polished[-1] > best[-1] + 1e-9:
        polished = _split_and_polish(best, zs, lower, upper)
    refined = polished is not None
    if refined:
        best = polished

    violation = float(max(0.0, -_constraint_values(best, zs).min()))
    return best, result.niter, violation, solver_ok or refined


def _result_from(x, violation, solver_ok):
    factors = np.sort(x[:-1])[::-1]
    g_bar = float(x[-1])
    converged = bool(solver_ok and violation <= 1e-8 and 0.0 < g_bar < 1.0)
    scheme = Scheme(
        factors=tuple(factors),
        c_ratio=None,
        g_bar=g_bar if g_bar < 1.0 else None,
    )
    return scheme, g_bar, converged


def _run_chain(m, stages, tolerances):
    """Solve a continuation chain, warm-starting each stage's factors."""
    warm_factors = None
    iterations = 0
    for stage_c in stages:
        problem = make_problem(m, stage_c, initial_factors=warm_factors, tolerances=tolerances)
        best, niter, violation, solver_ok = _solve(problem)
        iterations += niter
        warm_factors = best[:-1]
    return best, iterations, violation, solver_ok


def _stage_ladders(c_ratio):
    """Continuation ladders to try, most direct first.

    The default policy runs continuation only for thick ellipses (at or
    above 1/3).  On failure, fall back to continuation from below for
    any ratio, then to a ladder with an extra midpoint stage; long
    cycles occasionally need the smaller steps to stay on the solution
    branch.
    """
    anchors = [c for c in _CONTINUATION_ANCHORS if c < c_ratio]
    default = (anchors if c_ratio >= _CONTINUATION_THRESHOLD else []) + [c_ratio]
    ladders = [default]
    if anchors and c_ratio < _CONTINUATION_THRESHOLD:
        ladders.append(anchors + [c_ratio])
    last = anchors[-1] if anchors else c_ratio / 2.0
    if last < c_ratio:
        ladders.append(anchors + [(last + c_ratio) / 2.0, c_ratio])
    return ladders


def derive_scheme(m, c_ratio, tolerances=None):
    """Derive the length-m scheme optimized over the (m, c_ratio) ellipse.

    Initialization follows a fixed policy: the analytic real-axis scheme
    seeds the factors, the bound seeds just above the seed's worst
    amplification, and thick-ellipse targets are reached by continuation
    through the smaller anchor ratios.  Failed runs retry on finer
    continuation ladders before giving up.  Factors are returned sorted
    descending.  A run that still ends infeasible or over budget is
    flagged ``converged=False`` with the best iterate kept.
    """
    if m < 2:
        raise ValueError(f"scheme derivation needs m >= 2, got {m}")
    if not 0.0 <= c_ratio <= 1.0:
        raise ValueError(f"c_ratio must lie in [0, 1], got {c_ratio}")

    iterations = 0
    outcome = None
    for stages in _stage_ladders(c_ratio):
        best, niter, violation, solver_ok = _run_chain(m, stages, tolerances)
        iterations += niter
        candidate = (best, violation, solver_ok)
        if outcome is None or _better_outcome(candidate, outcome):
            outcome = candidate
        if solver_ok and violation <= 1e-8:
            break

    best, violation, solver_ok = outcome
    scheme, g_bar, converged = _result_from(best, violation, solver_ok)
    scheme = Scheme(factors=scheme.factors, c_ratio=float(c_ratio), g_bar=scheme.g_bar)
    return OptimizationResult(
        scheme=scheme,
        g_bar=g_bar,
        converged=converged,
        iterations=iterations,
        max_constraint_violation=violation,
    )


def _better_outcome(candidate, incumbent):
    cand_ok = candidate[2] and candidate[1] <= 1e-8
    inc_ok = incumbent[2] and incumbent[1] <= 1e-8
    if cand_ok != inc_ok:
        return cand_ok
    if cand_ok:
        return candidate[0][-1] < incumbent[0][-1]
    return candidate[1] < incumbent[1]
