"""Catalog of admissible perturbations c(t,x) and initial conditions v0.

Every entry is a closed-form vectorized callable with analytically derived
metadata: a lower bound m, an upper bound, and time-Hoelder data (L, alpha)
with |c(t,x) - c(s,x)| <= L|t-s|^alpha uniformly in x.  Solvers rely on the
metadata (decay bounds, integrand bounds), so it must be honest.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from .errors import CatalogError, ParameterError


@dataclass(frozen=True)
class Potential:
    """A perturbation c(t,x), bounded, with time-Hoelder regularity metadata.

    inf_bound is any valid lower bound m <= c (it need not be attained);
    sup_bound is any valid upper bound.  evaluate must broadcast over numpy
    arrays in both arguments.
    """

    name: str
    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    inf_bound: float
    sup_bound: float
    hoelder_L: float
    hoelder_alpha: float

    def __call__(self, t, x):
        return self.evaluate(t, x)


@dataclass(frozen=True)
class InitialCondition:
    """An initial condition v0(x).

    class_tag is a coarse admission label: "L2" (square integrable),
    "continuous_vanishing" (continuous, -> 0 at infinity) or "C4_bounded".
    sup_norm is None when v0 is unbounded.  oracle_only marks the non-L2
    entries (one, identity, square) that are admitted solely for the
    closed-form Wiener-integral identities; grid and path solvers that
    need integrability or boundedness reject them via this flag.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    class_tag: str
    sup_norm: float | None
    oracle_only: bool = False

    def __call__(self, x):
        return self.evaluate(x)


# --- catalog evaluation kernels (module level so instances pickle) ---

def _zero_c(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _const_c(kappa, t, x):
    return np.full_like(np.asarray(x, dtype=float), kappa)


def _gauss_cos_c(a, omega, t, x):
    return a * np.cos(omega * np.asarray(t)) * np.exp(-np.asarray(x) ** 2)


def _bump_c(a, t, x):
    return a / (1.0 + np.asarray(x, dtype=float) ** 2) + 0.0 * np.asarray(t)


def _one_v0(x):
    return np.ones_like(np.asarray(x, dtype=float))


def _identity_v0(x):
    return np.asarray(x, dtype=float) + 0.0


def _square_v0(x):
    return np.asarray(x, dtype=float) ** 2


def _gaussian_v0(sigma, x):
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (2.0 * sigma**2))


def _hat_v0(a, x):
    return np.maximum(0.0, 1.0 - np.abs(np.asarray(x, dtype=float)) / a)


_SPEC_RE = re.compile(r"^\s*([a-z_][a-z0-9_]*)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def _parse(spec: str) -> tuple[str, tuple[float, ...]]:
    m = _SPEC_RE.match(spec)
    if m is None:
        raise CatalogError(f"malformed catalog spec {spec!r}")
    name, argstr = m.group(1), m.group(2)
    if argstr is None or argstr.strip() == "":
        return name, ()
    try:
        args = tuple(float(a) for a in argstr.split(","))
    except ValueError as exc:
        raise CatalogError(f"non-numeric argument in {spec!r}") from exc
    return name, args


def _arity(name: str, args: tuple, n: int) -> None:
    if len(args) != n:
        raise CatalogError(f"{name} takes {n} argument(s), got {len(args)}")


POTENTIAL_NAMES = ("zero", "constant(kappa)", "gauss_cos(a,omega)", "bump(a)")
V0_NAMES = ("one", "identity", "square", "gaussian(sigma)", "hat(a)")


def builtin(spec: str) -> Potential:
    """Resolve a potential catalog spec such as "zero" or "gauss_cos(1,1)".

    Catalog, with lower/upper bounds and Hoelder data:

    - zero:            c = 0.                           m=0, sup=0, L=0.
    - constant(k):     c = k.                           m=sup=k, L=0.
    - gauss_cos(a,w):  c = a cos(w t) exp(-x^2).        m=-|a|, sup=|a|, L=|a w|, alpha=1.
    - bump(a):         c = a/(1+x^2), time independent. m=min(0,a), sup=max(0,a), L=0.

    All entries are continuous, bounded and time-Hoelder, which is what
    uniqueness theory asks of the perturbation.  The stronger hypothesis
    c in L2(]0,T[ x R) additionally needs decay in x: gauss_cos and bump
    satisfy it (and zero trivially), constant(k) with k != 0 does not.
    """
    name, args = _parse(spec)
    if name == "zero":
        _arity(name, args, 0)
        return Potential("zero", _zero_c, 0.0, 0.0, 0.0, 1.0)
    if name == "constant":
        _arity(name, args, 1)
        kappa = args[0]
        return Potential(f"constant({kappa:g})", partial(_const_c, kappa),
                         kappa, kappa, 0.0, 1.0)
    if name == "gauss_cos":
        _arity(name, args, 2)
        a, omega = args
        return Potential(f"gauss_cos({a:g},{omega:g})", partial(_gauss_cos_c, a, omega),
                         -abs(a), abs(a), abs(a * omega), 1.0)
    if name == "bump":
        _arity(name, args, 1)
        a = args[0]
        return Potential(f"bump({a:g})", partial(_bump_c, a),
                         min(0.0, a), max(0.0, a), 0.0, 1.0)
    raise CatalogError(
        f"unknown potential {name!r}; valid names: {', '.join(POTENTIAL_NAMES)}")


def builtin_v0(spec: str) -> InitialCondition:
    """Resolve an initial-condition catalog spec such as "gaussian(1)".

    - gaussian(s): exp(-x^2/2s^2).  In L2, continuous vanishing, C4 with
      bounded derivatives: satisfies every solution-theory hypothesis.
    - hat(a): max(0, 1-|x|/a).  In L2, continuous vanishing, but not C1.
    - one, identity, square: smooth but not L2 (and identity/square are
      unbounded); they only satisfy the integrability needed by the
      closed-form Wiener integrals, hence oracle_only=True.
    """
    name, args = _parse(spec)
    if name == "one":
        _arity(name, args, 0)
        return InitialCondition("one", _one_v0, "C4_bounded", 1.0, oracle_only=True)
    if name == "identity":
        _arity(name, args, 0)
        return InitialCondition("identity", _identity_v0, "C4_bounded", None,
                                oracle_only=True)
    if name == "square":
        _arity(name, args, 0)
        return InitialCondition("square", _square_v0, "C4_bounded", None,
                                oracle_only=True)
    if name == "gaussian":
        _arity(name, args, 1)
        sigma = args[0]
        if sigma <= 0:
            raise ParameterError("gaussian sigma must be positive")
        return InitialCondition(f"gaussian({sigma:g})", partial(_gaussian_v0, sigma),
                                "L2", 1.0)
    if name == "hat":
        _arity(name, args, 1)
        a = args[0]
        if a <= 0:
            raise ParameterError("hat half-width must be positive")
        return InitialCondition(f"hat({a:g})", partial(_hat_v0, a),
                                "continuous_vanishing", 1.0)
    raise CatalogError(
        f"unknown initial condition {name!r}; valid names: {', '.join(V0_NAMES)}")
