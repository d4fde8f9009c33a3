"""
Lyapunov-type functionals phi_p, V_p, Lambda_p and numerical checks of the
inequalities they are known to satisfy.

The functionals are implemented exactly as written below::

    phi_p(x, y) = (p/q) ||x||^q - p <x, J y> + ||y||^p

For p = 2 on an unweighted (or weighted L^2) grid this reduces to
``||x - y||^2``.  For p != 2 this form is not a Bregman distance
(``phi_p(x, x) != 0`` in general), so the inequality checks are only
meaningful as hard assertions at p = 2; other exponents are reported.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .spaces import (
    ConjugatePair,
    GridVector,
    ProductVector,
    dual_norm,
    duality_map,
    inverse_duality_map,
    norm_p,
    pairing,
)

__all__ = [
    "FunctionalReport",
    "SLACK",
    "phi_p",
    "v_p",
    "wedge_p",
    "check_phi_bounds",
    "check_lemma_vp_descent",
    "check_lemma_three_point",
    "check_lemma_ball_bound",
    "lemma_sweep",
]

SLACK = 1e-9


@dataclass(frozen=True)
class FunctionalReport:
    """Outcome of one inequality check ``lower <= value <= upper``.

    One-sided inequalities use an infinite bound on the unused side.
    ``gap`` is the distance to the binding bound (nonnegative when the
    inequality holds); ``note`` explains non-finite bounds.
    """

    value: float
    lower_bound: float
    upper_bound: float
    satisfied: bool
    gap: float = math.nan
    note: str = ""

    def to_dict(self):
        d = asdict(self)
        for key in ("value", "lower_bound", "upper_bound", "gap"):
            v = d[key]
            d[key] = v if math.isfinite(v) else str(v)
        return d


def _within(lower: float, value: float, upper: float, slack: float = SLACK) -> bool:
    if math.isnan(lower) or math.isnan(value) or math.isnan(upper):
        return False
    ok_low = True
    ok_up = True
    if math.isfinite(lower):
        ok_low = value >= lower - slack * (1.0 + max(abs(lower), abs(value)))
    if math.isfinite(upper):
        ok_up = value <= upper + slack * (1.0 + max(abs(upper), abs(value)))
    return ok_low and ok_up


def _report(value, lower=-math.inf, upper=math.inf, note=""):
    if math.isfinite(lower) and not math.isfinite(upper):
        gap = value - lower
    elif math.isfinite(upper) and not math.isfinite(lower):
        gap = upper - value
    else:
        gap = min(value - lower, upper - value)
    return FunctionalReport(
        value=float(value),
        lower_bound=float(lower),
        upper_bound=float(upper),
        satisfied=_within(lower, value, upper),
        gap=float(gap),
        note=note,
    )


def phi_p(x: GridVector, y: GridVector, pair: ConjugatePair) -> float:
    p, q = pair.p, pair.q
    return (p / q) * norm_p(x, pair) ** q - p * pairing(x, duality_map(y, pair)) + norm_p(y, pair) ** p


def v_p(x: GridVector, xstar: GridVector, pair: ConjugatePair) -> float:
    """V_p(x, x*) for x in E and x* in E*.

    The last term is ``||J^{E*} x*||^p`` (which equals ``||x*||_*^q``), so
    that ``V_p(x, x*) = phi_p(x, J^{E*} x*)`` holds for every p.  At p = 2
    this coincides with ``||x*||^2``.
    """
    p, q = pair.p, pair.q
    return (p / q) * norm_p(x, pair) ** q - p * pairing(x, xstar) + dual_norm(xstar, pair) ** q


def wedge_p(x1: ProductVector, x2: ProductVector, pair: ConjugatePair) -> float:
    """Lambda_p((u1, v1), (u2, v2)) = phi_p(u1, u2) + phi_p(v1, v2)."""
    return phi_p(x1.first, x2.first, pair) + phi_p(x1.second, x2.second, pair)


def check_phi_bounds(x: GridVector, y: GridVector, pair: ConjugatePair) -> FunctionalReport:
    """Sandwich ``(||x|| - ||y||)^p <= phi_p(x, y) <= (||x|| + ||y||)^p``.

    The lower bound is evaluated as written; a negative base with a
    non-integer exponent yields NaN and the check is reported unsatisfied.
    """
    p = pair.p
    nx, ny = norm_p(x, pair), norm_p(y, pair)
    base = nx - ny
    note = ""
    if base < 0 and not float(p).is_integer():
        lower = math.nan
        note = "lower bound undefined: negative base to a non-integer power"
    else:
        lower = base**p
    return _report(phi_p(x, y, pair), lower, (nx + ny) ** p, note)


def check_lemma_vp_descent(
    x: GridVector, xstar: GridVector, ystar: GridVector, pair: ConjugatePair
) -> FunctionalReport:
    """``V_p(x, x*) + p <J^{E*}x* - x, y*> <= V_p(x, x* + y*)``.

    ``value`` is the left side, ``upper_bound`` the right side.
    """
    jx = inverse_duality_map(xstar, pair)
    lhs = v_p(x, xstar, pair) + pair.p * (pairing(jx, ystar) - pairing(x, ystar))
    rhs = v_p(x, xstar.like(xstar.coords + ystar.coords), pair)
    return _report(lhs, upper=rhs)


def check_lemma_three_point(
    x: GridVector, y: GridVector, z: GridVector, pair: ConjugatePair
) -> FunctionalReport:
    """``phi_p(y, x) - phi_p(y, z) >= p <z - y, Jx - Jz>``."""
    lhs = phi_p(y, x, pair) - phi_p(y, z, pair)
    djx = duality_map(x, pair).coords - duality_map(z, pair).coords
    rhs = pair.p * pairing(z.like(z.coords - y.coords), x.like(djx))
    return _report(lhs, lower=rhs)


def check_lemma_ball_bound(x: GridVector, y: GridVector, pair: ConjugatePair) -> FunctionalReport:
    """``||x - y||^p >= phi_p(x, y) - (p/q) ||x||^q``."""
    p, q = pair.p, pair.q
    lhs = norm_p(x.like(x.coords - y.coords), pair) ** p
    rhs = phi_p(x, y, pair) - (p / q) * norm_p(x, pair) ** q
    return _report(lhs, lower=rhs)


def _ball_sample(rng, dim, radius=1.0):
    d = rng.standard_normal(dim)
    d /= np.linalg.norm(d)
    return radius * rng.uniform() ** (1.0 / dim) * d


def lemma_sweep(pair: ConjugatePair, samples=500, seed=0, dim=3) -> dict:
    """Monte-Carlo sweep of all four inequality checks.

    Vectors are standard normal in R^dim, except for the ball lemma where
    both points are drawn uniformly from the unit ball.  Returns pass counts
    per check plus the smallest observed gap.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    checks = {
        "phi_bounds": lambda: check_phi_bounds(_g(rng, dim), _g(rng, dim), pair),
        "vp_descent": lambda: check_lemma_vp_descent(
            _g(rng, dim), _g(rng, dim), _g(rng, dim), pair
        ),
        "three_point": lambda: check_lemma_three_point(
            _g(rng, dim), _g(rng, dim), _g(rng, dim), pair
        ),
        "ball_bound": lambda: check_lemma_ball_bound(
            GridVector(_ball_sample(rng, dim)), GridVector(_ball_sample(rng, dim)), pair
        ),
    }
    out = {}
    for name, draw in checks.items():
        reports = [draw() for _ in range(samples)]
        gaps = [r.gap for r in reports if math.isfinite(r.gap)]
        out[name] = {
            "samples": samples,
            "passed": sum(r.satisfied for r in reports),
            "min_gap": min(gaps) if gaps else None,
        }
    return out


def _g(rng, dim):
    return GridVector(rng.standard_normal(dim))
