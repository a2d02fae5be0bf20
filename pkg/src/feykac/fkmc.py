"""Monte Carlo estimators of the two Wiener-integral representations.

The main representation, for t > 0,

    v(t,x) = E[ v0(sqrt(2t) w(1) + x)
                exp(-t int_0^1 (x + sqrt(2t) w(s))^2 ds)
                exp(-t int_0^1 c(t(1-s), sqrt(2t) w(s) + x) ds) ]

averages over Brownian paths on [0,1]; the small-time representation
(estimate_v_alt) uses paths on [0, 2t] instead and never rescales w.

Estimators draw one stream per path index, evaluate path functionals on
fixed-size chunks, and reduce in index order, so results are bit
identical for any worker count.  Per-path integrand factors are checked
against their a-priori bounds: the quadratic factor lies in (0, 1] and
the potential factor in (0, e^{-m t}] where m is the potential's lower
bound (trapezoid averages of c stay within [m, sup], so the bounds
survive discretization exactly).
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import (DomainError, IntegrandBoundError, ParameterError,
                     SmallTimeGuardError)
from .mehler import closed_form_k
from .potentials import InitialCondition, Potential
from .wiener import sample_increment_matrix

CHUNK = 8192
_BOUND_SLACK = 1.0 + 1e-12


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo mean with standard error.

    n_paths counts samples; with antithetic pairing each (w, -w) pair is
    one sample, and std_error = sample standard deviation / sqrt(n_paths).
    """

    mean: float
    std_error: float
    n_paths: int
    m_steps: int


def _finish(values: np.ndarray, m_steps: int) -> MCEstimate:
    n = values.size
    mean = float(values.mean())
    if n > 1:
        se = float(np.sqrt(np.sum((values - mean) ** 2) / (n - 1) / n))
    else:
        se = 0.0
    return MCEstimate(mean, se, n, m_steps)


def _paths(seed: int, start: int, count: int, m_steps: int,
           horizon: float) -> np.ndarray:
    """(count, m_steps+1) matrix of path values, one stream per row."""
    z = sample_increment_matrix(seed, start, count, m_steps)
    w = np.empty((count, m_steps + 1))
    w[:, 0] = 0.0
    np.cumsum(z * np.sqrt(horizon / m_steps), axis=1, out=w[:, 1:])
    return w


def _check_factor_bounds(gfac: np.ndarray, hfac: np.ndarray, t: float,
                         c: Potential) -> None:
    if gfac.max(initial=0.0) > _BOUND_SLACK or gfac.min(initial=1.0) <= 0.0:
        raise IntegrandBoundError("quadratic factor left (0, 1]")
    hbound = np.exp(-c.inf_bound * t) * _BOUND_SLACK
    if hfac.max(initial=0.0) > hbound or hfac.min(initial=1.0) <= 0.0:
        raise IntegrandBoundError(
            f"potential factor left (0, e^(-m t)] for m={c.inf_bound}")


def _main_integrand(w: np.ndarray, s: np.ndarray, t: float, x: float,
                    v0: InitialCondition, c: Potential
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Per-path integrand of the main representation plus its quadratic factor."""
    sq = np.sqrt(2.0 * t)
    shifted = sq * w + x
    gfac = np.exp(-t * np.trapezoid(shifted**2, s, axis=1))
    hfac = np.exp(-t * np.trapezoid(c.evaluate(t * (1.0 - s), shifted), s, axis=1))
    _check_factor_bounds(gfac, hfac, t, c)
    return v0.evaluate(shifted[:, -1]) * gfac * hfac, gfac


def integrand_values(t: float, x: float, v0: InitialCondition, c: Potential,
                     n_paths: int, m_steps: int, seed: int,
                     start_stream: int = 0, antithetic: bool = False,
                     with_control: bool = False) -> np.ndarray:
    """Per-sample integrand values for streams start_stream + 0..n_paths-1.

    With antithetic=True each sample is the (w, -w) pair average.  With
    with_control=True the result has shape (2, n_paths): values and the
    bare quadratic factor (the control variate with known mean k(t,x)).
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if n_paths < 1:
        raise ParameterError("n_paths must be >= 1")
    if v0.sup_norm is None:
        raise ParameterError(
            f"initial condition {v0.name!r} is unbounded; Monte Carlo "
            "estimation needs a bounded v0")
    s = np.linspace(0.0, 1.0, m_steps + 1)
    vals = np.empty(n_paths)
    ctrl = np.empty(n_paths) if with_control else None
    for start in range(0, n_paths, CHUNK):
        count = min(CHUNK, n_paths - start)
        w = _paths(seed, start_stream + start, count, m_steps, 1.0)
        f, g = _main_integrand(w, s, t, x, v0, c)
        if antithetic:
            fm, gm = _main_integrand(-w, s, t, x, v0, c)
            f, g = 0.5 * (f + fm), 0.5 * (g + gm)
        vals[start:start + count] = f
        if with_control:
            ctrl[start:start + count] = g
    if with_control:
        return np.stack([vals, ctrl])
    return vals


def _field_worker(args):
    (t, x, v0, c, n_paths, m_steps, seed, start_stream, antithetic,
     with_control, chunk_index) = args
    start = chunk_index * CHUNK
    count = min(CHUNK, n_paths - start)
    out = integrand_values(t, x, v0, c, count, m_steps, seed,
                           start_stream=start_stream + start,
                           antithetic=antithetic, with_control=with_control)
    return chunk_index, out


def estimate_v(t: float, x: float, v0: InitialCondition, c: Potential,
               n_paths: int, m_steps: int = 512, seed: int = 0,
               antithetic: bool = False, n_workers: int = 1,
               control_variate: bool = False,
               stream_offset: int = 0) -> MCEstimate:
    """Estimate v(t,x) from the main Wiener-integral representation.

    Deterministic given (seed, stream_offset): streams are assigned by
    path index and reduced in index order, so the estimate is bit
    identical for any n_workers.  control_variate subtracts the centered
    quadratic factor (known mean closed_form_k) with a regression
    coefficient; it is off by default.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if n_paths < 1:
        raise ParameterError("n_paths must be >= 1")
    if n_workers <= 1 or n_paths <= CHUNK:
        raw = integrand_values(t, x, v0, c, n_paths, m_steps, seed,
                               start_stream=stream_offset,
                               antithetic=antithetic,
                               with_control=control_variate)
    else:
        n_chunks = (n_paths + CHUNK - 1) // CHUNK
        jobs = [(t, x, v0, c, n_paths, m_steps, seed, stream_offset,
                 antithetic, control_variate, i) for i in range(n_chunks)]
        parts: list = [None] * n_chunks
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            for idx, out in pool.map(_field_worker, jobs):
                parts[idx] = out
        raw = np.concatenate(parts, axis=-1)
    if control_variate:
        vals, ctrl = raw
        var = float(np.var(ctrl))
        b = float(np.cov(vals, ctrl, bias=True)[0, 1]) / var if var > 0 else 0.0
        vals = vals - b * (ctrl - closed_form_k(t, x))
    else:
        vals = raw
    return _finish(vals, m_steps)


def estimate_moment(t: float, x: float, order: int, n_paths: int,
                    m_steps: int = 512, seed: int = 0) -> MCEstimate:
    """Estimate int w(1)^order exp(-t int_0^1 (x + sqrt(2t) w)^2 ds) dm_W.

    Targets closed_form_moment1 / closed_form_moment2 for order 1 / 2.
    """
    if order not in (1, 2):
        raise ParameterError("order must be 1 or 2")
    if t <= 0:
        raise DomainError("t must be positive")
    if n_paths < 1:
        raise ParameterError("n_paths must be >= 1")
    s = np.linspace(0.0, 1.0, m_steps + 1)
    sq = np.sqrt(2.0 * t)
    vals = np.empty(n_paths)
    for start in range(0, n_paths, CHUNK):
        count = min(CHUNK, n_paths - start)
        w = _paths(seed, start, count, m_steps, 1.0)
        gfac = np.exp(-t * np.trapezoid((x + sq * w) ** 2, s, axis=1))
        vals[start:start + count] = w[:, -1] ** order * gfac
    return _finish(vals, m_steps)


def estimate_v_alt(t: float, x: float, v0: InitialCondition, c: Potential,
                   n_paths: int, m_steps: int = 512, seed: int = 0,
                   t_max_alt: float = 0.5) -> MCEstimate:
    """Estimate v(t,x) from the small-time representation on [0, 2t]:

        E[ v0(w(2t) + x) exp(-1/2 int_0^{2t} (x + w(s))^2 ds)
           exp(-1/2 int_0^{2t} c(t - s/2, w(s) + x) ds) ].

    Only valid for small t; the configurable guard t_max_alt (default
    0.5) stands in for the unquantified smallness restriction.
    """
    if t <= 0:
        raise DomainError("t must be positive")
    if t > t_max_alt:
        raise SmallTimeGuardError(
            f"t={t} exceeds t_max_alt={t_max_alt}: the small-time "
            "representation is only established for sufficiently small t")
    if n_paths < 1:
        raise ParameterError("n_paths must be >= 1")
    if v0.sup_norm is None:
        raise ParameterError(
            f"initial condition {v0.name!r} is unbounded; Monte Carlo "
            "estimation needs a bounded v0")
    horizon = 2.0 * t
    s = np.linspace(0.0, horizon, m_steps + 1)
    vals = np.empty(n_paths)
    for start in range(0, n_paths, CHUNK):
        count = min(CHUNK, n_paths - start)
        w = _paths(seed, start, count, m_steps, horizon)
        shifted = w + x
        gfac = np.exp(-0.5 * np.trapezoid(shifted**2, s, axis=1))
        hfac = np.exp(-0.5 * np.trapezoid(
            c.evaluate(t - s / 2.0, shifted), s, axis=1))
        _check_factor_bounds(gfac, hfac, t, c)
        vals[start:start + count] = v0.evaluate(w[:, -1] + x) * gfac * hfac
    return _finish(vals, m_steps)


def estimate_field(ts, xs, v0: InitialCondition, c: Potential, config
                   ) -> list[tuple[float, float, MCEstimate]]:
    """Per-(t,x) estimates with disjoint deterministic streams.

    Cell (i,j) uses streams starting at (i*len(xs)+j)*n_paths, so a
    single-cell field reproduces estimate_v exactly and cells never share
    paths.
    """
    ts = list(ts)
    xs = list(xs)
    rows = []
    for i, t in enumerate(ts):
        for j, x in enumerate(xs):
            offset = (i * len(xs) + j) * config.n_paths
            est = estimate_v(t, x, v0, c, config.n_paths,
                             m_steps=config.m_steps, seed=config.seed,
                             antithetic=config.antithetic,
                             n_workers=config.n_workers,
                             stream_offset=offset)
            rows.append((t, x, est))
    return rows
