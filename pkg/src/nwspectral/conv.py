"""Closed-form codomain solver for the convolutional nonlinearity.

The p-fold convolution power transforms to a pointwise p-th power, so each
grid frequency obeys the scalar Bernoulli equation

    u'(s,t) = -(b + D (2 pi s)^2) u + eps u^p.

Its solution factors as u = g(s,t) e^(-bt) h(s,t)^(-1/(p-1)) with g the
Gaussian codomain factor and h the integrated nonlinear response. h can
vanish at a finite time, where the solution blows up; root location and
pole policy live here as well.
"""

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad_vec

from .core import (DEFAULT_L, DEFAULT_N, BranchError, KernelSpec,
                   PhysicalParams, PoleError, SolverError, SpatialGrid,
                   SpectralField, SpectralGrid, make_grids)
from .kernels import erfc_pair, gauss_codomain, heat_kernel
from .spectral import TransformPlan, circular_convolve_many

REGIMES = ("no_root", "root_at", "asymptotic_infinity")
KERNEL_MODES = ("product_K1", "convolution_K2")

# Integrand floor below which a non-finite forced-integrand entry is treated
# as an underflowed zero rather than a genuine overflow of k/g.
_FORCING_FLOOR = 1e-250


def beta_of(s, params):
    """Codomain decay rate b + D (2 pi s)^2."""
    s = np.asarray(s, dtype=float)
    out = params.b + params.D * (2.0 * np.pi * s) ** 2
    return out if out.ndim else float(out)


def _phi(z):
    # (1 - e^(-z))/z with the removable singularity filled by its series;
    # the switch point 1e-8 keeps both branches accurate to ~1e-16
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < 1e-8
    safe = np.where(small, 1.0, z)
    with np.errstate(over="ignore"):
        out = np.where(small, 1.0 - 0.5 * z, -np.expm1(-safe) / safe)
    return out


def h_specific(s, t, params, kernel=None):
    """h(s,t) = C(s) - eps (1 - e^(-(p-1)(b + D(2 pi s)^2) t))/(b + D(2 pi s)^2).

    Written as C - eps (p-1) t phi((p-1) beta t) so the b = 0, s = 0 point
    reduces smoothly to the limit form C - eps (p-1) t. The reciprocal
    integrating factor e^((p-1)bt) is deliberately excluded; it re-enters
    through the e^(-bt) factor of u.
    """
    kernel = KernelSpec() if kernel is None else kernel
    s = np.asarray(s, dtype=float)
    C = kernel.C_at(s)
    if params.eps == 0.0:
        # exact collapse to C; also avoids 0 * phi(inf) = nan at huge z
        out = np.broadcast_arrays(np.asarray(C, dtype=float),
                                  np.asarray(t, dtype=float))[0].copy()
        return out if np.ndim(out) else float(out)
    beta = beta_of(s, params)
    pm1 = params.p - 1.0
    z = pm1 * np.asarray(beta) * t
    out = C - params.eps * pm1 * t * _phi(z)
    return out if np.ndim(out) else float(out)


def _h_power(h, p, policy="report"):
    """h^(-1/(p-1)) with a real branch for negative h only when p-1 is odd."""
    m = -1.0 / (p - 1.0)
    h = np.asarray(h, dtype=float)
    if np.any(h < 0) and (p - 1) % 2 == 0:
        raise BranchError("h < 0 with even p-1: no real root exists")
    if policy == "clamp":
        tiny = 1e-300
        h = np.where(np.abs(h) < tiny, np.where(h < 0, -tiny, tiny), h)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(h == 0.0, np.inf, np.sign(h) * np.abs(h) ** m)
    return out if out.ndim else float(out)


def _root_times(params, kernel, s):
    """Per-frequency first root of h(s, .), nan where none exists."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    beta = np.atleast_1d(beta_of(s, params))
    C = np.broadcast_to(np.asarray(kernel.C_at(s), dtype=float), beta.shape)
    eps, p = params.eps, params.p
    out = np.full(beta.shape, np.nan)
    if eps == 0.0:
        return out
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = (eps - C * beta) / eps
        t0 = np.where(beta == 0.0, C / (eps * (p - 1.0)),
                      -np.log(ratio) / ((p - 1.0) * beta))
    good = np.isfinite(t0) & (t0 >= 0.0)
    out[good] = t0[good]
    return out


def earliest_root(params, kernel, s):
    """Smallest root time of h over the probed frequencies, or None."""
    roots = _root_times(params, kernel, s)
    if not np.any(np.isfinite(roots)):
        return None
    return float(np.nanmin(roots))


@dataclass(frozen=True)
class ConvSolution:
    """Bundle of coefficients, integration-constant profile, and grid.

    Point accessors h_spec/F/u evaluate at arbitrary (s, t); the _field
    accessors sample the grid frequencies and wrap a SpectralField.
    h_spec(s, 0) = C(s) exactly, and with eps = 0 the solution collapses
    to g e^(-bt) with no quadrature involved.
    """

    params: PhysicalParams
    kernel: KernelSpec = None
    grid: SpectralGrid = None

    def __post_init__(self):
        if self.kernel is None:
            object.__setattr__(self, "kernel", KernelSpec())
        if self.grid is None:
            object.__setattr__(self, "grid", make_grids(DEFAULT_N, DEFAULT_L)[1])

    @property
    def m(self):
        return -1.0 / (self.params.p - 1.0)

    def h_spec(self, s, t):
        return h_specific(s, t, self.params, self.kernel)

    def F(self, s, t):
        """F(s,t) = e^(-bt) h^(-1/(p-1)), so that u = g F."""
        h = h_specific(s, t, self.params, self.kernel)
        return np.exp(-self.params.b * t) * _h_power(h, self.params.p,
                                                     self.kernel.pole_policy)

    def u(self, s, t):
        return _u_values(self, np.asarray(s, dtype=float), t)

    def h_field(self, t):
        vals = self.h_spec(self.grid.frequencies, t)
        return SpectralField(self.grid, float(t), vals)

    def F_field(self, t):
        vals = self.F(self.grid.frequencies, t)
        return SpectralField(self.grid, float(t), vals)

    def u_field(self, t):
        vals = self.u(self.grid.frequencies, t)
        return SpectralField(self.grid, float(t), vals)


def _u_values(solution, s, t, policy=None):
    params, kernel = solution.params, solution.kernel
    policy = kernel.pole_policy if policy is None else policy
    if policy == "error":
        t0 = earliest_root(params, kernel, s)
        if t0 is not None and t >= t0:
            raise PoleError("t = %g is at or past the earliest pole t0 = %g"
                            % (t, t0))
    h = h_specific(s, t, params, kernel)
    hp = _h_power(h, params.p, policy)
    return gauss_codomain(s, t, params.D) * np.exp(-params.b * t) * hp


def solve_codomain(t, solution):
    """Field of u(s,t) = g e^(-bt) h^(-1/(p-1)) on the solution grid."""
    if not t >= 0:
        raise ValueError("t must be >= 0")
    return solution.u_field(t)


def solve_physical(t, solution, plan=None):
    """Spatial samples of u(., t), the inverse transform of solve_codomain.

    Requires t > 0 (the t = 0 state is distributional for C = 1) and a grid
    fine enough that the codomain Gaussian is negligible at Nyquist.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    grid = solution.grid
    if plan is None:
        plan = TransformPlan(SpatialGrid(grid.n_points, grid.length), grid)
    elif plan.spectral != grid:
        raise ValueError("plan grid must match the solution grid")
    if not grid.band_limit_ok(solution.params.D, t):
        raise SolverError(
            "grid cannot band-limit the solution at t = %g (margin %.3e)"
            % (t, grid.band_limit_margin(solution.params.D, t)))
    field = solution.u_field(t)
    if not np.all(np.isfinite(field.values)):
        raise PoleError("codomain field is singular at t = %g" % t)
    return plan.inverse(field)


BernoulliTerms = namedtuple("BernoulliTerms", ["derivative", "linear",
                                               "nonlinear"])


def _guard_root_distance(solution, s, t, dt):
    roots = _root_times(solution.params, solution.kernel, s)
    near = np.isfinite(roots) & (np.abs(roots - t) <= 10.0 * dt)
    if np.any(near):
        raise ValueError("t is within 10 dt of a root of h")


def bernoulli_terms(solution, s, t, dt=None):
    """The three identity terms F'g, bFg, eps F^p g^p at (s, t).

    F' uses the 5-point central stencil with step dt <= 1e-3 t.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    dt = 1e-3 * t if dt is None else dt
    if not 0.0 < dt <= 1e-3 * t:
        raise ValueError("dt must satisfy 0 < dt <= 1e-3 t")
    s = np.asarray(s, dtype=float)
    _guard_root_distance(solution, s, t, dt)
    params = solution.params
    stencil = [solution.F(s, t + k * dt) for k in (-2, -1, 1, 2)]
    Fprime = (stencil[0] - 8.0 * stencil[1]
              + 8.0 * stencil[2] - stencil[3]) / (12.0 * dt)
    F0 = solution.F(s, t)
    g = gauss_codomain(s, t, params.D)
    return BernoulliTerms(Fprime * g, params.b * F0 * g,
                          params.eps * F0 ** params.p * g ** params.p)


def bernoulli_residual(solution, s, t, dt=None):
    """|F'g + bFg - eps F^p g^p| at (s, t), with F' by finite difference."""
    terms = bernoulli_terms(solution, s, t, dt)
    out = np.abs(terms.derivative + terms.linear - terms.nonlinear)
    return out if np.ndim(out) else float(out)


def codomain_ode_residual(solution, s, t, dt=None):
    """Relative residual of u' + (D (2 pi s)^2 + b) u - eps u^p at (s, t).

    This is the transformed image of the PDE itself and the strongest
    single correctness property of the solver. Scaled by the largest of
    the three terms.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    dt = 1e-3 * t if dt is None else dt
    if not 0.0 < dt <= 1e-3 * t:
        raise ValueError("dt must satisfy 0 < dt <= 1e-3 t")
    s = np.asarray(s, dtype=float)
    _guard_root_distance(solution, s, t, dt)
    params = solution.params
    stencil = [solution.u(s, t + k * dt) for k in (-2, -1, 1, 2)]
    uprime = (stencil[0] - 8.0 * stencil[1]
              + 8.0 * stencil[2] - stencil[3]) / (12.0 * dt)
    u0 = solution.u(s, t)
    lin = beta_of(s, params) * u0
    nonlin = params.eps * u0 ** params.p
    resid = np.abs(uprime + lin - nonlin)
    scale = np.maximum.reduce([np.abs(uprime), np.abs(lin),
                               np.abs(nonlin), np.full(resid.shape, 1e-300)])
    out = resid / scale
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class RootReport:
    """First zero of h(s, .) with the regime classification.

    t0 carries the formula value when the regime is root_at; the bisection
    value is an independent cross-check and the report keeps both plus
    their difference.
    """

    t0: object
    regime: str
    s: float
    C: float
    t0_formula: object
    t0_bisection: object
    difference: object
    params: PhysicalParams
    t_max: float


def _root_time_scalar(C, beta, eps, p):
    if eps == 0.0:
        return None, "no_root"
    if beta == 0.0:
        t0 = C / (eps * (p - 1.0))
        return (float(t0), "root_at") if t0 >= 0.0 else (None, "no_root")
    ratio = (eps - C * beta) / eps
    if ratio == 0.0:
        return None, "asymptotic_infinity"
    if ratio > 0.0:
        t0 = -math.log(ratio) / ((p - 1.0) * beta)
        if t0 >= 0.0:
            return float(t0), "root_at"
    return None, "no_root"


def _bisect_h_root(params, kernel, s, t_max, n_scan=4096, iters=200):
    ts = np.linspace(0.0, t_max, n_scan + 1)
    hs = np.asarray(h_specific(s, ts, params, kernel))
    if hs[0] == 0.0:
        return 0.0
    sign0 = np.sign(hs[0])
    # Demand a strict sign reversal: in the asymptotic regime h decays to 0
    # and eventually underflows to exact 0.0 without ever crossing.
    flips = np.nonzero(np.sign(hs) == -sign0)[0]
    if flips.size == 0:
        return None
    k = int(flips[0])
    lo, hi = float(ts[k - 1]), float(ts[k])
    flo = float(hs[k - 1])
    if flo == 0.0:
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = float(h_specific(s, mid, params, kernel))
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def root_locus(params, kernel=None, s=0.0, t_max=None):
    """Locate the first zero of h(s, .) by formula and verify by bisection.

    The formula value is t0 = log(eps/(eps - C beta))/((p-1) beta); the
    report classifies the regime as no_root, root_at, or
    asymptotic_infinity (eps = C beta exactly).
    """
    kernel = KernelSpec() if kernel is None else kernel
    if params.b == 0.0:
        raise ValueError("root locus requires b != 0")
    C = float(np.asarray(kernel.C_at(float(s)), dtype=float))
    beta = beta_of(float(s), params)
    t0_formula, regime = _root_time_scalar(C, beta, params.eps, params.p)
    if t_max is None:
        t_max = 50.0 if t0_formula is None else max(50.0, 4.0 * t0_formula)
    t0_bis = _bisect_h_root(params, kernel, float(s), t_max)
    diff = None
    if t0_formula is not None and t0_bis is not None:
        diff = abs(t0_formula - t0_bis)
    return RootReport(t0=t0_formula if regime == "root_at" else None,
                      regime=regime, s=float(s), C=C,
                      t0_formula=t0_formula, t0_bisection=t0_bis,
                      difference=diff, params=params, t_max=float(t_max))


def large_p_limit(params, kernel=None, t=1.0,
                  p_values=(2, 4, 8, 16, 32, 64, 128), grid=None):
    """sup_s |h^(-1/(p-1)) - 1| along a doubling sweep in p.

    Any constant to the power 0 is unity, so the sequence decreases to 0.
    Requires C identically 1 and |eps| <= 1; the p carried by params is
    ignored in favor of the sweep.
    """
    kernel = KernelSpec() if kernel is None else kernel
    grid = make_grids(DEFAULT_N, DEFAULT_L)[1] if grid is None else grid
    if not t > 0:
        raise ValueError("t must be positive")
    if abs(params.eps) > 1.0:
        raise ValueError("|eps| must be <= 1")
    s = grid.frequencies
    if np.any(np.asarray(kernel.C_at(s)) != 1.0):
        raise ValueError("C must be the constant 1")
    ps = [int(q) for q in p_values]
    if any(q != float(orig) for q, orig in zip(ps, p_values)) \
            or any(q < 2 for q in ps) \
            or any(hi <= lo for lo, hi in zip(ps, ps[1:])):
        raise ValueError("p sweep must be strictly increasing integers >= 2")
    sups = []
    for q in ps:
        pq = PhysicalParams(params.D, params.b, params.eps, q)
        h = h_specific(s, t, pq, kernel)
        sups.append(float(np.abs(_h_power(h, q) - 1.0).max()))
    return np.asarray(sups)


def _check_quadrature(err, result, rel_tol):
    scale = float(np.max(np.abs(result))) if np.size(result) else 0.0
    if err > 10.0 * max(1e-14, rel_tol * max(scale, 1.0)):
        raise SolverError("time quadrature did not converge (err %.3e)" % err)


def solve_forced(t, solution, forcing, initial=0.0):
    """Forced response u = g e^(-bt) h^m [B(s) + int_0^t k g^(-1) e^(b tau)
    h(s,-tau)^m dtau], m = -1/(p-1).

    forcing is a callable k(s, tau) over the grid frequencies; initial is
    the profile B(s) (callable, array, or constant) multiplying the
    homogeneous solution. The integrand contains g^(-1), which grows as
    e^(D (2 pi s)^2 tau); k must be band-limited so the product stays
    bounded. With eps = 0 this is the exact linear forced solution.
    """
    if not t >= 0:
        raise ValueError("t must be >= 0")
    params, kernel, grid = solution.params, solution.kernel, solution.grid
    p = params.p
    s = grid.frequencies
    if callable(initial):
        B = np.asarray(initial(s), dtype=complex)
        if B.shape != s.shape:
            raise ValueError("initial profile length must match grid")
    else:
        B = np.broadcast_to(np.asarray(initial, dtype=complex), s.shape)
    growth = params.D * (2.0 * np.pi * s) ** 2 + params.b

    def integrand(tau):
        kv = np.asarray(forcing(s, tau), dtype=complex)
        if kv.shape != s.shape:
            raise ValueError("forcing must return one value per frequency")
        hneg = h_specific(s, -tau, params, kernel)
        hp = _h_power(hneg, p, "report")
        with np.errstate(over="ignore", invalid="ignore"):
            val = kv * np.exp(growth * tau) * hp
        bad = ~np.isfinite(val)
        if np.any(bad):
            if np.any(np.abs(kv[bad]) > _FORCING_FLOOR):
                raise SolverError("forcing is not band-limited: k/g overflows")
            val = np.where(bad, 0.0, val)
        return val

    if t == 0.0:
        response = np.zeros(s.shape, dtype=complex)
    else:
        response, err = quad_vec(integrand, 0.0, float(t),
                                 epsabs=1e-14, epsrel=kernel.quad_rel_tol,
                                 norm="max")
        _check_quadrature(err, response, kernel.quad_rel_tol)
    homogeneous = _u_values(solution, s, t)
    return SpectralField(grid, float(t), homogeneous * (response + B))


def solve_with_kernels(t, solution, extra=(), mode="product_K1"):
    """Solution with extra codomain kernel profiles folded into h.

    product_K1 convolves the profiles into kappa = k1 conv ... conv kn and
    uses kappa^(p-1) g^(p-1) inside the time integral, with kappa also
    multiplying the solution. convolution_K2 multiplies the profiles
    pointwise and raises the product to the n-th power inside the
    integral. An empty profile list falls back to the plain solve.
    """
    if mode not in KERNEL_MODES:
        raise ValueError("mode must be one of %s" % (KERNEL_MODES,))
    if not t >= 0:
        raise ValueError("t must be >= 0")
    params, kernel, grid = solution.params, solution.kernel, solution.grid
    s = grid.frequencies
    profiles = []
    for q in extra:
        arr = np.asarray(q(s) if callable(q) else q, dtype=float)
        if arr.shape != s.shape:
            raise ValueError("kernel profile length must match grid")
        if not np.all(np.isfinite(arr)):
            raise ValueError("kernel profiles must be finite on the grid")
        profiles.append(arr)
    if not profiles:
        return solution.u_field(t)
    p = params.p
    beta = beta_of(s, params)
    if mode == "product_K1":
        kappa = profiles[0] if len(profiles) == 1 \
            else circular_convolve_many(profiles, grid.ds)
        amplitude = kappa ** (p - 1)
    else:
        merged = profiles[0].copy()
        for nxt in profiles[1:]:
            merged = merged * nxt
        amplitude = merged ** len(profiles)

    def integrand(tau):
        return amplitude * np.exp(-(p - 1.0) * beta * tau)

    if t == 0.0:
        integral = np.zeros(s.shape)
    else:
        integral, err = quad_vec(integrand, 0.0, float(t),
                                 epsabs=1e-14, epsrel=kernel.quad_rel_tol,
                                 norm="max")
        _check_quadrature(err, integral, kernel.quad_rel_tol)
    h = np.asarray(kernel.C_at(s), dtype=float) - params.eps * (p - 1.0) * integral
    hp = _h_power(h, p, kernel.pole_policy)
    u = gauss_codomain(s, t, params.D) * np.exp(-params.b * t) * hp
    if mode == "product_K1":
        u = u * kappa
    return SpectralField(grid, float(t), u)


def _check_fisher(params):
    if params.p != 2:
        raise ValueError("p must be 2")
    if abs(params.eps) > 0.1:
        raise ValueError("|eps| must be <= 0.1")
    if not params.b > 0:
        raise ValueError("b must be positive")


def fisher_erfc_approx(x, t, params):
    """Small-eps closed form for p = 2 built from four erfc terms:

    G e^(-bt) + eps e^(-bt) pair(x,t; D,b) - eps e^(-2bt) pair(x,t; 2D,b)

    where pair is the erfc pair of e^(-D(2 pi s)^2 t)/(b + D(2 pi s)^2)
    and the substitution D -> 2D reproduces the printed sqrt(2D) factors
    of the last term verbatim.
    """
    _check_fisher(params)
    if not t > 0:
        raise ValueError("t must be positive")
    D, b, eps = params.D, params.b, params.eps
    x = np.asarray(x, dtype=float)
    decay = math.exp(-b * t)
    linear = heat_kernel(x, t, D) * decay
    second = eps * decay * erfc_pair(x, t, D, b)
    third = eps * decay * decay * erfc_pair(x, t, 2.0 * D, b)
    return linear + second - third


def fisher_erfc_transform_consistent(x, t, params):
    """Variant of fisher_erfc_approx whose last term is the exact spatial
    pair of its codomain counterpart eps g^2 e^(-2bt)/(b + D(2 pi s)^2).

    Writing 1/(b + D w^2) = 2/(2b + 2D w^2) turns the last term into twice
    the erfc pair at (2D, 2b). Agrees with the inverse transform of
    fisher_codomain_expansion to round-off; the printed form differs in
    this term only.
    """
    _check_fisher(params)
    if not t > 0:
        raise ValueError("t must be positive")
    D, b, eps = params.D, params.b, params.eps
    x = np.asarray(x, dtype=float)
    decay = math.exp(-b * t)
    linear = heat_kernel(x, t, D) * decay
    second = eps * decay * erfc_pair(x, t, D, b)
    third = 2.0 * eps * decay * decay * erfc_pair(x, t, 2.0 * D, 2.0 * b)
    return linear + second - third


def fisher_codomain_expansion(s, t, params):
    """First-order expansion of u(s,t) in eps for p = 2:

    g e^(-bt) + eps g e^(-bt)/beta - eps g^2 e^(-2bt)/beta.
    """
    _check_fisher(params)
    s = np.asarray(s, dtype=float)
    g = gauss_codomain(s, t, params.D)
    beta = beta_of(s, params)
    decay = math.exp(-params.b * t)
    return g * decay + params.eps * g * decay / beta \
        - params.eps * g * g * decay * decay / beta
