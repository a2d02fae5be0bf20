"""Alternating splitting scheme v_n on [0, t].

The interval [0, t] is cut into 2n pieces bounded by tau_k = k t / (2n).
On even pieces the scheme runs the unperturbed flow at doubled speed
(exactly, via the Mehler step U_{2 dtau}); on odd pieces it solves the
frozen-coefficient equation dv/dtau = -2 c(tau_{2k+2}, x) v, i.e. a
pointwise multiplication by exp(-2 c(tau_{2k+2}, x) dtau).  The doubled
speeds compensate for each flow acting on half of every macro interval.

For n <= 3 the scheme's value at (t, x) also has an explicit n-fold
Gaussian integral form, evaluated here by tensor Gauss-Hermite as an
oracle fully independent of the grid machinery.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionGuardError, ParameterError
from .mehler import (DEFAULT_QUAD_ORDER, GridFunction, apply_semigroup_grid,
                     default_grid)
from .potentials import InitialCondition, Potential

EDGE_DECAY = 1e-8


@dataclass(frozen=True)
class SplitSchedule:
    """Uniform schedule tau_k = k t / (2n), k = 0..2n."""

    t: float
    n: int

    def __post_init__(self):
        if self.t <= 0:
            raise ParameterError("t must be positive")
        if self.n < 1:
            raise ParameterError("n must be >= 1")

    @property
    def dt(self) -> float:
        return self.t / (2 * self.n)

    @property
    def boundaries(self) -> np.ndarray:
        return np.linspace(0.0, self.t, 2 * self.n + 1)


def step_even(v: GridFunction, dt: float,
              quad_order: int = DEFAULT_QUAD_ORDER) -> GridFunction:
    """Even sub-interval step: the doubled-speed heat flow U_{2 dt}."""
    if dt <= 0:
        raise ParameterError("dt must be positive")
    return apply_semigroup_grid(v, 2.0 * dt, quad_order)


def step_odd(v: GridFunction, dt: float, c: Potential,
             tau_next: float) -> GridFunction:
    """Odd sub-interval step: multiply by exp(-2 c(tau_next, x) dt).

    tau_next is the right endpoint tau_{2k+2} at which the coefficient is
    frozen.
    """
    factor = np.exp(-2.0 * c.evaluate(tau_next, v.xs) * dt)
    return v.with_values(v.values * factor)


def _tabulate(v0: InitialCondition, grid: GridFunction | None) -> GridFunction:
    if grid is None:
        grid = default_grid()
    vals = np.asarray(v0.evaluate(grid.xs), dtype=float)
    peak = np.max(np.abs(vals))
    if peak > 0 and max(abs(vals[0]), abs(vals[-1])) > EDGE_DECAY * peak:
        raise ParameterError(
            f"initial condition {v0.name!r} does not decay at the grid "
            "edges; widen the grid or pick a decaying v0")
    return grid.with_values(vals)


def run_vn(t: float, n: int, v0: InitialCondition, c: Potential,
           grid: GridFunction | None = None,
           quad_order: int = DEFAULT_QUAD_ORDER) -> GridFunction:
    """Run the 2n-step alternating scheme from v0; returns v_n(t, .)."""
    sched = SplitSchedule(t, n)
    v = _tabulate(v0, grid)
    dt = sched.dt
    for k in range(n):
        v = step_even(v, dt, quad_order)
        v = step_odd(v, dt, c, (2 * k + 2) * dt)
    return v


def run_vn_trace(t: float, n: int, v0: InitialCondition, c: Potential,
                 grid: GridFunction | None, probe_points,
                 quad_order: int = DEFAULT_QUAD_ORDER
                 ) -> tuple[GridFunction, dict[float, np.ndarray]]:
    """run_vn that also records probe values at every even boundary tau_{2k}.

    The recorded times k t / n, k = 0..n, contain all dyadic times
    k t / 2^q with 2^q dividing n; they exhibit convergence on the dyadic
    set as n runs through powers of two.
    """
    sched = SplitSchedule(t, n)
    probes = np.asarray(probe_points, dtype=float)
    v = _tabulate(v0, grid)
    trace = {0.0: v.interp(probes)}
    dt = sched.dt
    for k in range(n):
        v = step_even(v, dt, quad_order)
        v = step_odd(v, dt, c, (2 * k + 2) * dt)
        trace[(2 * k + 2) * dt] = v.interp(probes)
    return v, trace


def iterated_integral_vn(t: float, n: int, x: float, v0: InitialCondition,
                         c: Potential, quad_order: int = 80) -> float:
    """Brute-force n-fold integral form of v_n(t, x), for n <= 3.

    With ch = ch(2t/n), sh = sh(2t/n) and the convention sigma_0 = 0:

        v_n(t,x) = int (2 pi sh)^{-n/2} v0(sigma_n + x/ch^n)
            exp(-1/2 (ch/sh) sum_j (sigma_{n-j+1} - sigma_{n-j}/ch)^2)
            exp(-1/2 (sh/ch) sum_j (sigma_{n-j} + x/ch^{n-j})^2)
            exp(-(t/n)    sum_j c(j t/n, sigma_{n-j} + x/ch^{n-j}))
            dsigma_1 ... dsigma_n.

    The substitution y_j = sigma_{n+1-j} - sigma_{n-j}/ch (unit Jacobian)
    turns the first exponential into a product of independent Gaussians,
    integrated by tensor Gauss-Hermite.  Entirely independent of the grid
    scheme; serves as its oracle.
    """
    if n < 1:
        raise ParameterError("n must be >= 1")
    if n > 3:
        raise DimensionGuardError("iterated integral limited to n <= 3")
    if t <= 0:
        raise ParameterError("t must be positive")
    if v0.sup_norm is None:
        raise ParameterError(f"{v0.name!r} is unbounded")
    u, w = np.polynomial.hermite.hermgauss(quad_order)
    ch, sh = np.cosh(2.0 * t / n), np.sinh(2.0 * t / n)
    nodes = np.sqrt(2.0 * sh / ch) * u
    ys = np.meshgrid(*([nodes] * n), indexing="ij")
    wgt = np.ones_like(ys[0])
    for gw in np.meshgrid(*([w] * n), indexing="ij"):
        wgt = wgt * gw
    # invert the substitution: sigma_k = y_{n+1-k} + sigma_{k-1}/ch
    sigma: list = [0.0]
    for k in range(1, n + 1):
        sigma.append(ys[n - k] + sigma[k - 1] / ch)
    quad_sum = 0.0
    pot_sum = 0.0
    for j in range(1, n + 1):
        arg = sigma[n - j] + x / ch ** (n - j)
        quad_sum = quad_sum + arg * arg
        pot_sum = pot_sum + c.evaluate(j * t / n, arg)
    integrand = v0.evaluate(sigma[n] + x / ch**n) \
        * np.exp(-0.5 * (sh / ch) * quad_sum - (t / n) * pot_sum)
    return float(np.sum(wgt * integrand) / (np.pi * ch) ** (n / 2.0))


@dataclass
class DyadicStudy:
    """Convergence record of v_{2^p} at probe points for p = 1..p_max.

    values[i] holds the probes of v_{2^p} at time t for p = ps[i];
    sup_diffs[i] = max |values[i+1] - values[i]|; orders[i] is the dyadic
    rate estimate log2(sup_diffs[i] / sup_diffs[i+1]).  dyadic_traces maps
    each p to {tau: probe values} at the quarter-point times k t / 4,
    exhibiting convergence at fixed dyadic times as p grows.
    """

    t: float
    probe_points: np.ndarray
    ps: list[int]
    values: np.ndarray
    sup_diffs: np.ndarray
    orders: np.ndarray
    dyadic_traces: dict[int, dict[float, np.ndarray]] = field(repr=False,
                                                              default_factory=dict)

    def fitted_order(self) -> float:
        """Least-squares slope of log2 sup_diffs against p."""
        if self.sup_diffs.size < 2:
            raise ParameterError("need at least two differences to fit")
        p = np.asarray(self.ps[:-1], dtype=float)
        slope = np.polyfit(p, np.log2(self.sup_diffs), 1)[0]
        return float(-slope)


def dyadic_study(t: float, p_max: int, v0: InitialCondition, c: Potential,
                 grid: GridFunction | None = None, probe_points=(0.0, 1.0),
                 quad_order: int = DEFAULT_QUAD_ORDER) -> DyadicStudy:
    """Run v_{2^p} for p = 1..p_max and record dyadic convergence data."""
    if p_max < 1 or p_max > 8:
        raise ParameterError("p_max must lie in 1..8")
    probes = np.asarray(probe_points, dtype=float)
    quarter = [k * t / 4.0 for k in range(1, 5)]
    ps = list(range(1, p_max + 1))
    values = np.empty((len(ps), probes.size))
    traces: dict[int, dict[float, np.ndarray]] = {}
    for i, p in enumerate(ps):
        final, tr = run_vn_trace(t, 2**p, v0, c, grid, probes, quad_order)
        values[i] = final.interp(probes)
        if p >= 2:
            traces[p] = {tau: tr[tau] for tau in quarter if tau in tr}
    diffs = np.max(np.abs(np.diff(values, axis=0)), axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        orders = np.log2(diffs[:-1] / diffs[1:])
    return DyadicStudy(t, probes, ps, values, diffs, orders, traces)
