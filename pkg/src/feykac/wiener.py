"""Brownian path sampling and finite-dimensional Wiener integrals.

Paths live on [0, horizon] with w(0)=0 and are piecewise linear between
equally spaced samples; time integrals along a path use the trapezoid
rule.  Seeding is counter based: stream (master_seed, stream_id) always
yields the same path, regardless of execution order or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionGuardError, ParameterError
from .potentials import Potential


@dataclass(frozen=True)
class SeedSpec:
    """Deterministic per-path stream: (master_seed, stream_id) -> generator."""

    master_seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.master_seed,
                                    spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass
class Path:
    """A sampled trajectory: strictly increasing times, values, w(0)=0."""

    times: np.ndarray
    values: np.ndarray
    horizon: float

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.shape != self.values.shape:
            raise ParameterError("times and values must have equal length")
        if self.horizon <= 0:
            raise ParameterError("horizon must be positive")
        if self.times[0] != 0.0 or self.values[0] != 0.0:
            raise ParameterError("paths start at t=0 with w(0)=0")
        if np.any(np.diff(self.times) <= 0) or self.times[-1] > self.horizon * (1 + 1e-12):
            raise ParameterError("times must increase strictly within the horizon")


def sample_path(m_steps: int, horizon: float, seed: SeedSpec) -> Path:
    """Sample a Brownian path at m_steps+1 equally spaced times.

    Increments are independent N(0, horizon/m_steps) draws from the
    stream's generator, so the same SeedSpec reproduces the path bit for
    bit.
    """
    if m_steps < 1:
        raise ParameterError("m_steps must be >= 1")
    if horizon <= 0:
        raise ParameterError("horizon must be positive")
    dt = horizon / m_steps
    z = seed.generator().standard_normal(m_steps)
    values = np.empty(m_steps + 1)
    values[0] = 0.0
    np.cumsum(z * np.sqrt(dt), out=values[1:])
    return Path(np.linspace(0.0, horizon, m_steps + 1), values, float(horizon))


def sample_increment_matrix(master_seed: int, start_stream: int, n_paths: int,
                            m_steps: int) -> np.ndarray:
    """Standard-normal increments for streams start_stream..start_stream+n_paths-1.

    Row r holds exactly the draws of SeedSpec(master_seed, start_stream+r),
    i.e. the matrix is bit-compatible with sample_path one row at a time.
    """
    if m_steps < 1:
        raise ParameterError("m_steps must be >= 1")
    z = np.empty((n_paths, m_steps))
    for r in range(n_paths):
        z[r] = SeedSpec(master_seed, start_stream + r).generator().standard_normal(m_steps)
    return z


def normal_density(times, xs) -> float:
    """Joint density of (w(t_1),...,w(t_n)) at (xs_1,...,xs_n), with xi_0=0.

    Equals ((2 pi)^n prod(t_i - t_{i-1}))^{-1/2}
    exp(-1/2 sum (xi_i - xi_{i-1})^2 / (t_i - t_{i-1})).
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(xs, dtype=float)
    if t.ndim != 1 or x.shape != t.shape or t.size == 0:
        raise ParameterError("times and xs must be 1-d of equal nonzero length")
    dt = np.diff(np.concatenate([[0.0], t]))
    if np.any(dt <= 0):
        raise ParameterError("times must be strictly increasing and positive")
    dx = np.diff(np.concatenate([[0.0], x]))
    norm = (2.0 * np.pi) ** (t.size / 2.0) * np.sqrt(np.prod(dt))
    return float(np.exp(-0.5 * np.sum(dx * dx / dt)) / norm)


def finite_dim_integral(phi, times, quad_order: int = 40) -> float:
    """Integrate phi against the normal density by tensor Gauss-Hermite.

    The quadrature acts in the independent-increment coordinates
    eta_i = xi_i - xi_{i-1} ~ N(0, t_i - t_{i-1}), which diagonalizes the
    density.  phi is called with an (N, n) array of evaluation points and
    must return an (N,) array (scalar results broadcast).  Guarded to
    n <= 4 so the tensor grid stays bounded.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ParameterError("times must be a nonempty 1-d sequence")
    n = t.size
    if n > 4:
        raise DimensionGuardError("tensor quadrature limited to n <= 4 times")
    dt = np.diff(np.concatenate([[0.0], t]))
    if np.any(dt <= 0):
        raise ParameterError("times must be strictly increasing and positive")
    u, w = np.polynomial.hermite.hermgauss(quad_order)
    eta = [np.sqrt(2.0 * d) * u for d in dt]
    grids = np.meshgrid(*eta, indexing="ij")
    xi = []
    acc = 0.0
    for g in grids:
        acc = acc + g
        xi.append(acc)
    pts = np.stack([g.ravel() for g in xi], axis=-1)
    wgt = np.ones_like(grids[0])
    for gw in np.meshgrid(*([w] * n), indexing="ij"):
        wgt = wgt * gw
    vals = np.broadcast_to(np.asarray(phi(pts), dtype=float), (pts.shape[0],))
    return float(np.sum(wgt.ravel() * vals) / np.pi ** (n / 2.0))


def quadratic_functional(path: Path, t: float, x: float) -> float:
    """Trapezoid value of int_0^1 (x + sqrt(2t) w(s))^2 ds along the path."""
    if path.horizon != 1.0:
        raise ParameterError("quadratic_functional expects a horizon-1 path")
    if t <= 0:
        raise ParameterError("t must be positive")
    integrand = (x + np.sqrt(2.0 * t) * path.values) ** 2
    return float(np.trapezoid(integrand, path.times))


def potential_functional(path: Path, t: float, x: float, c: Potential) -> float:
    """Trapezoid value of int_0^1 c(t(1-s), sqrt(2t) w(s) + x) ds.

    The time argument runs backwards, from t at s=0 down to 0 at s=1.
    """
    if path.horizon != 1.0:
        raise ParameterError("potential_functional expects a horizon-1 path")
    if t <= 0:
        raise ParameterError("t must be positive")
    s = path.times
    vals = c.evaluate(t * (1.0 - s), np.sqrt(2.0 * t) * path.values + x)
    return float(np.trapezoid(vals, s))
