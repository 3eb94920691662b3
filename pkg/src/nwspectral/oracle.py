"""Independent time integrators used to accept or reject the closed forms.

The PDE oracle steps the codomain field with the linear part integrated
exactly (it is diagonal there) and a classical 4th-order explicit stage for
the nonlinearity, so every digit of disagreement with a closed-form solution
is attributable to the nonlinear term or to the formula itself. A scalar
per-frequency integrator covers the codomain ODE, including finite-time
blow-up detection.
"""

import math
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .core import KernelSpec, PhysicalParams, SolverError, SpectralField
from .conv import ConvSolution, solve_forced
from .mult import MultSolverPlan, mult_codomain
from .spectral import TransformPlan

NONLINEARITIES = ("convolution_p", "multiplicative_p", "forced_convolution")

# distributional initial data cannot be sampled; analytic starts wait until
# the field is band-limited on any reasonable grid
_ANALYTIC_T_MIN = 0.05

_BLOWUP_THRESHOLD = 1e8
_INSTABILITY_FACTOR = 1e6

Trajectory = namedtuple("Trajectory", ["times", "values"])


class BlowUpError(SolverError):
    """The scalar integrator hit the blow-up threshold in finite time."""

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


def stability_bound(params, plan):
    """Largest dt the explicit nonlinear stage tolerates on this grid."""
    s_max = plan.spectral.s_max
    return 0.5 / (params.D * (2.0 * math.pi * s_max) ** 2 + abs(params.b))


@dataclass(frozen=True)
class OracleRun:
    """One reference integration: parameters, grid, scheme inputs.

    initial = None resolves the analytic solution of the chosen
    nonlinearity at t_start (requires t_start >= 0.05); an explicit array
    is taken as codomain samples on the plan's grid. forcing is a callable
    (s, t) -> codomain forcing samples, consumed only by the
    forced_convolution mode. kernel_profile is an optional codomain
    multiplier on the u^p term (physical-space convolution of the
    nonlinearity with an extra kernel), convolution modes only. Every
    store_every-th step is kept in the trajectory, plus the final state.
    """

    params: PhysicalParams
    plan: TransformPlan
    nonlinearity: str
    t_start: float
    t_end: float
    dt: float
    initial: object = None
    store_every: int = 1
    kernel: KernelSpec = None
    forcing: object = None
    kernel_profile: object = None

    def __post_init__(self):
        if self.kernel is None:
            object.__setattr__(self, "kernel", KernelSpec())
        if self.nonlinearity not in NONLINEARITIES:
            raise ValueError("nonlinearity must be one of %s"
                             % (NONLINEARITIES,))
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)
                and 0.0 <= self.t_start < self.t_end):
            raise ValueError("need 0 <= t_start < t_end")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        bound = stability_bound(self.params, self.plan)
        if self.dt > bound:
            raise ValueError("dt = %g exceeds the stability bound %g"
                             % (self.dt, bound))
        span = self.t_end - self.t_start
        steps = round(span / self.dt)
        if steps < 1 or abs(steps * self.dt - span) > 1e-9 * max(1.0, span):
            raise ValueError("dt must divide t_end - t_start")
        if not (isinstance(self.store_every, int) and self.store_every >= 1):
            raise ValueError("store_every must be a positive integer")
        if self.nonlinearity == "forced_convolution":
            if not callable(self.forcing):
                raise ValueError("forced_convolution requires a forcing callable")
        elif self.forcing is not None:
            raise ValueError("forcing is only consumed by forced_convolution")
        if self.initial is None:
            if self.t_start < _ANALYTIC_T_MIN:
                raise ValueError("analytic start requires t_start >= %g"
                                 % _ANALYTIC_T_MIN)
        else:
            arr = np.asarray(self.initial, dtype=complex)
            if arr.shape != (self.plan.n,):
                raise ValueError("initial samples must match the grid")
            if not np.all(np.isfinite(arr)):
                raise ValueError("initial samples must be finite")
            object.__setattr__(self, "initial", arr)
        if self.kernel_profile is not None:
            if self.nonlinearity == "multiplicative_p":
                raise ValueError("kernel_profile applies to convolution modes")
            s = self.plan.spectral.frequencies
            prof = self.kernel_profile
            prof = np.asarray(prof(s) if callable(prof) else prof,
                              dtype=complex)
            if prof.shape != (self.plan.n,):
                raise ValueError("kernel_profile length must match the grid")
            if not np.all(np.isfinite(prof)):
                raise ValueError("kernel_profile must be finite")
            object.__setattr__(self, "kernel_profile", prof)

    @property
    def n_steps(self):
        return round((self.t_end - self.t_start) / self.dt)


def resolve_initial(run):
    """Codomain start field at t_start: explicit samples if given, else the
    analytic solution of the run's own nonlinearity."""
    if run.initial is not None:
        return np.array(run.initial, dtype=complex)
    if run.nonlinearity == "multiplicative_p":
        field, flagged = mult_codomain(
            run.t_start, MultSolverPlan(run.params, run.kernel),
            run.plan.spectral)
        if np.any(flagged):
            raise SolverError("analytic start has overflow-flagged frequencies")
        return np.array(field.values, dtype=complex)
    solution = ConvSolution(run.params, run.kernel, run.plan.spectral)
    if run.nonlinearity == "forced_convolution":
        return np.asarray(
            solve_forced(run.t_start, solution, run.forcing), dtype=complex)
    return np.array(solution.u_field(run.t_start).values, dtype=complex)


def _dealiased_power(values, p, plan):
    # 3/2-rule zero padding: evaluate the pointwise power on a finer
    # physical grid so the retained band carries no aliased quadratic terms
    n = plan.n
    fine = 3 * n // 2
    pad = (fine - n) // 2
    spec = np.concatenate([np.zeros(pad, dtype=complex),
                           np.asarray(values, dtype=complex),
                           np.zeros(fine - n - pad, dtype=complex)])
    dx_fine = 2.0 * plan.spatial.length / fine
    u_fine = np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(spec))) / dx_fine
    w_fine = u_fine ** p
    w_spec = dx_fine * np.fft.fftshift(np.fft.fft(np.fft.ifftshift(w_fine)))
    return w_spec[pad:pad + n]


def _nonlinear_stage(run, s):
    eps, p = run.params.eps, run.params.p
    prof = 1.0 if run.kernel_profile is None else run.kernel_profile
    if run.nonlinearity == "convolution_p":
        def stage(u, t):
            return eps * prof * u ** p
    elif run.nonlinearity == "multiplicative_p":
        def stage(u, t):
            return eps * _dealiased_power(u, p, run.plan)
    else:
        forcing = run.forcing

        def stage(u, t):
            return eps * prof * u ** p + np.asarray(forcing(s, t),
                                                    dtype=complex)
    return stage


def step_etd(run):
    """Integrate the run, returning a Trajectory of stored codomain states.

    Linear factor e^(-(D(2 pi s)^2 + b) dt) applied exactly; nonlinear
    stage advanced by the integrating-factor RK4 tableau. Detected
    instability (norm growth past 1e6x the start without a flagged pole)
    aborts with the step time named.
    """
    s = run.plan.spectral.frequencies
    beta = run.params.b + run.params.D * (2.0 * np.pi * s) ** 2
    dt = run.dt
    E = np.exp(-beta * dt)
    E2 = np.exp(-beta * (0.5 * dt))
    stage = _nonlinear_stage(run, s)
    u = resolve_initial(run)
    norm0 = max(float(np.abs(u).max()), 1e-30)
    times = [run.t_start]
    states = [u.copy()]
    t = run.t_start
    for k in range(1, run.n_steps + 1):
        k1 = stage(u, t)
        a = E2 * (u + (0.5 * dt) * k1)
        k2 = stage(a, t + 0.5 * dt)
        b_st = E2 * u + (0.5 * dt) * k2
        k3 = stage(b_st, t + 0.5 * dt)
        c = E * u + dt * E2 * k3
        k4 = stage(c, t + dt)
        u = E * u + (dt / 6.0) * (E * k1 + 2.0 * E2 * k2 + 2.0 * E2 * k3 + k4)
        t = run.t_start + k * dt
        peak = float(np.abs(u).max()) if np.all(np.isfinite(u)) else math.inf
        if not math.isfinite(peak) or peak > _INSTABILITY_FACTOR * norm0:
            raise SolverError(
                "oracle run unstable at t = %g (amplitude grew past %g x "
                "start); consistent with stepping into a finite-time pole"
                % (t, _INSTABILITY_FACTOR))
        if k % run.store_every == 0 or k == run.n_steps:
            times.append(t)
            states.append(u.copy())
    return Trajectory(np.asarray(times), np.asarray(states))


def final_field(run):
    """Convenience: the end state of a run as a SpectralField."""
    traj = step_etd(run)
    return SpectralField(run.plan.spectral, float(traj.times[-1]),
                         traj.values[-1])


def scalar_ode_oracle(s, params, u0, t_end):
    """Adaptive integration of the per-frequency codomain ODE

        u' = -(D (2 pi s)^2 + b) u + eps u^p,   u(0) = u0

    to 1e-10 relative. Finite-time blow-up raises BlowUpError carrying the
    detected blow-up time."""
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    beta = params.b + params.D * (2.0 * math.pi * s) ** 2
    eps, p = params.eps, params.p

    def rhs(t, y):
        return [-beta * y[0] + eps * y[0] ** p]

    def blow(t, y):
        return abs(y[0]) - _BLOWUP_THRESHOLD

    blow.terminal = True
    blow.direction = 1.0
    sol = solve_ivp(rhs, (0.0, float(t_end)), [float(u0)], method="DOP853",
                    rtol=1e-10, atol=1e-12, events=blow)
    if sol.status == 1 and sol.t_events[0].size:
        t_blow = float(sol.t_events[0][0])
        raise BlowUpError("solution blew up at t = %g" % t_blow, t_blow)
    if sol.status != 0:
        raise SolverError("scalar integration failed: %s" % sol.message)
    return float(sol.y[0, -1])
