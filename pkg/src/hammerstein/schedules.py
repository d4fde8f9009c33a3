"""
Step-size / regularization schedules ``(lambda_n, theta_n)`` and a numerical
validator for the convergence conditions

    (0) lambda_n in (0, 1), theta_n in (0, 1/2)
    (i) theta_n -> 0
    (ii) sum lambda_n theta_n = infinity, and lambda_n = o(theta_n)
    (iii) ((theta_{n-1} / theta_n) - 1) / (lambda_n theta_n) -> 0

Limits cannot be decided from finitely many terms, so each verdict is a
trend test on probes spread over several decades past the horizon.  The
probe values are kept in the verdict so the judgement can be audited.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "InvalidScheduleError",
    "Schedule",
    "Verdict",
    "ScheduleReport",
    "make_schedule",
    "validate_schedule",
]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"

# per-decade log10 slope thresholds for "decays like a power" vs "flat"
DECAY_SLOPE = -0.01
FLAT_SLOPE = -1e-3
PROBE_DECADES = 6


class InvalidScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    """A pair of sequences indexed from n = 1.

    ``lambda_fn`` and ``theta_fn`` must accept integers or float arrays.
    ``params`` records how the schedule was built so it can be serialized.
    """

    lambda_fn: Callable
    theta_fn: Callable
    description: str
    params: dict = field(default_factory=dict)

    def lam(self, n):
        return self.lambda_fn(n)

    def theta(self, n):
        return self.theta_fn(n)

    def to_dict(self):
        return dict(self.params)


def make_schedule(kind="paper_experiment", **params) -> Schedule:
    """Build a schedule.

    Kinds
    -----
    ``paper_experiment``
        ``lambda_n = 1/n``, ``theta_n = 1/(n+1)``, reproduced literally even
        though ``lambda_1 = 1`` and ``theta_1 = 1/2`` sit on the boundary of
        the admissible intervals.
    ``power_law(a, b, scale, offset=1)``
        ``lambda_n = (n+offset)^-a``, ``theta_n = scale (n+offset)^-b``.
        The default offset keeps ``lambda_1 < 1`` and ``theta_1 < 1/2``.
    ``constant_theta(theta)``
        ``lambda_n = 1/n`` with a constant ``theta_n``; a deliberately
        non-compliant schedule for exercising the validator.
    """
    if isinstance(kind, dict):
        params = {**kind, **params}
        kind = params.pop("kind")

    if kind == "paper_experiment":
        return Schedule(
            lambda n: 1.0 / np.asarray(n, dtype=float),
            lambda n: 1.0 / (np.asarray(n, dtype=float) + 1.0),
            "lambda_n = 1/n, theta_n = 1/(n+1)",
            {"kind": kind},
        )

    if kind == "power_law":
        try:
            a = float(params["a"])
            b = float(params["b"])
            scale = float(params["scale"])
        except KeyError as exc:
            raise InvalidScheduleError(f"power_law needs a, b and scale ({exc} missing)") from None
        offset = float(params.get("offset", 1))
        if a <= 0 or b <= 0:
            raise InvalidScheduleError("power_law exponents a, b must be positive")
        if not 0 < scale <= 0.5:
            raise InvalidScheduleError("power_law scale must lie in (0, 1/2]")
        if offset < 0:
            raise InvalidScheduleError("offset must be nonnegative")
        # both sequences are decreasing, so n = 1 decides membership
        lam1 = (1 + offset) ** -a
        theta1 = scale * (1 + offset) ** -b
        if not (0 < lam1 < 1 and 0 < theta1 < 0.5):
            raise InvalidScheduleError(
                f"power_law(a={a}, b={b}, scale={scale}, offset={offset}) gives "
                f"lambda_1={lam1:g}, theta_1={theta1:g}; need lambda_n in (0,1), theta_n in (0,1/2)"
            )
        return Schedule(
            lambda n: (np.asarray(n, dtype=float) + offset) ** -a,
            lambda n: scale * (np.asarray(n, dtype=float) + offset) ** -b,
            f"lambda_n = (n+{offset:g})^-{a:g}, theta_n = {scale:g} (n+{offset:g})^-{b:g}",
            {"kind": kind, "a": a, "b": b, "scale": scale, "offset": offset},
        )

    if kind == "constant_theta":
        theta = float(params.get("theta", 0.4))
        return Schedule(
            lambda n: 1.0 / np.asarray(n, dtype=float),
            lambda n: np.full(np.shape(n), theta) if np.ndim(n) else theta,
            f"lambda_n = 1/n, theta_n = {theta:g}",
            {"kind": kind, "theta": theta},
        )

    raise InvalidScheduleError(f"unknown schedule kind {kind!r}")


@dataclass(frozen=True)
class Verdict:
    status: str
    evidence: dict
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass(frozen=True)
class ScheduleReport:
    description: str
    horizon: int
    cond_open_intervals: Verdict
    cond_theta_to_zero: Verdict
    cond_sum_diverges: Verdict
    cond_lambda_little_o: Verdict
    cond_ratio_limit: Verdict

    @property
    def verdicts(self) -> dict:
        return {
            "cond_open_intervals": self.cond_open_intervals,
            "cond_theta_to_zero": self.cond_theta_to_zero,
            "cond_sum_diverges": self.cond_sum_diverges,
            "cond_lambda_little_o": self.cond_lambda_little_o,
            "cond_ratio_limit": self.cond_ratio_limit,
        }

    @property
    def all_pass(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def to_dict(self):
        return asdict(self)


def _slopes(values: np.ndarray) -> np.ndarray:
    # probes are one decade apart, so this is d log10(value) / d log10(n)
    return np.diff(np.log10(values))


def _decay_verdict(probes, values, quantity) -> Verdict:
    """Judge ``values -> 0`` from positive values at decade-spaced probes."""
    values = np.asarray(values, dtype=float)
    evidence = {"probes": [float(n) for n in probes], quantity: values.tolist()}
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        return Verdict(INCONCLUSIVE, evidence, "non-finite or negative probe values")
    if np.any(values == 0):
        tail_zero = bool(np.all(values[np.argmax(values == 0):] == 0))
        status = PASS if tail_zero else INCONCLUSIVE
        return Verdict(status, evidence, "sequence reaches zero")
    slopes = _slopes(values)
    evidence["decade_slopes"] = slopes.tolist()
    if slopes[-1] >= FLAT_SLOPE:
        return Verdict(FAIL, evidence, f"{quantity} does not decay over the last decade")
    if np.all(slopes < DECAY_SLOPE):
        return Verdict(PASS, evidence, f"{quantity} decays in every probed decade")
    return Verdict(INCONCLUSIVE, evidence, "non-monotone or sub-power decay trend")


def _partial_sums(schedule, marks, chunk=1_000_000):
    """Partial sums of ``lambda_n theta_n`` up to each of ``marks``."""
    parts = []
    checkpoints = {}
    start = 1
    for mark in sorted(marks):
        while start <= mark:
            stop = min(mark, start + chunk - 1)
            n = np.arange(start, stop + 1, dtype=float)
            parts.append(float(np.sum(schedule.lam(n) * schedule.theta(n))))
            start = stop + 1
        checkpoints[mark] = math.fsum(parts)
    return checkpoints


def validate_schedule(s: Schedule, horizon: int = 1000) -> ScheduleReport:
    """Numerically probe the convergence conditions of a schedule.

    Probes sit at ``horizon * 10^k`` for ``k = 0..6``; partial sums of
    ``lambda_n theta_n`` are taken up to ``horizon``, ``10 horizon`` and
    ``100 horizon``.
    """
    horizon = int(horizon)
    if horizon < 1000:
        raise ValueError("horizon must be at least 1000")

    n = np.arange(1, horizon + 1, dtype=float)
    lam = np.broadcast_to(s.lam(n), n.shape)
    theta = np.broadcast_to(s.theta(n), n.shape)

    # (0) open-interval membership over 1..horizon
    bad_lam = np.flatnonzero(~((lam > 0) & (lam < 1)))
    bad_theta = np.flatnonzero(~((theta > 0) & (theta < 0.5)))
    ev = {
        "lambda_1": float(lam[0]),
        "theta_1": float(theta[0]),
        "first_lambda_violation_n": int(bad_lam[0] + 1) if bad_lam.size else None,
        "first_theta_violation_n": int(bad_theta[0] + 1) if bad_theta.size else None,
    }
    if bad_lam.size or bad_theta.size:
        open_iv = Verdict(FAIL, ev, "need lambda_n in (0,1) and theta_n in (0,1/2) for all n")
    else:
        open_iv = Verdict(PASS, ev)

    probes = horizon * 10.0 ** np.arange(PROBE_DECADES + 1)
    th = np.broadcast_to(s.theta(probes), probes.shape).astype(float)
    lm = np.broadcast_to(s.lam(probes), probes.shape).astype(float)

    # (i) theta_n -> 0, additionally requiring a 100-fold drop from theta_1
    v1 = _decay_verdict(probes, th, "theta")
    v1.evidence["theta_1"] = float(theta[0])
    if v1.status == PASS and not th[-1] < 1e-2 * theta[0]:
        v1 = Verdict(INCONCLUSIVE, v1.evidence, "theta decays but has not dropped below theta_1/100")

    # (ii-a) divergence of sum lambda_n theta_n: compare decade increments
    marks = [horizon, 10 * horizon, 100 * horizon]
    sums = _partial_sums(s, marks)
    d1 = sums[marks[1]] - sums[marks[0]]
    d2 = sums[marks[2]] - sums[marks[1]]
    ratio = d2 / d1 if d1 > 0 else math.nan
    ev = {
        "partial_sums": {str(k): v for k, v in sums.items()},
        "decade_increments": [d1, d2],
        "increment_ratio": ratio,
    }
    if not math.isfinite(ratio):
        v2 = Verdict(INCONCLUSIVE, ev, "partial sums not increasing")
    elif ratio >= 0.9:
        v2 = Verdict(PASS, ev, "decade increments do not shrink: partial sums grow without bound")
    elif ratio <= 0.5:
        v2 = Verdict(FAIL, ev, "decade increments shrink geometrically: the series converges")
    else:
        v2 = Verdict(INCONCLUSIVE, ev, "decade increments shrink slowly")

    # (ii-b) lambda_n = o(theta_n)
    v_o = _decay_verdict(probes, lm / th, "lambda_over_theta")

    # (iii) ((theta_{n-1}/theta_n) - 1) / (lambda_n theta_n) -> 0
    th_prev = np.broadcast_to(s.theta(probes - 1), probes.shape).astype(float)
    r = (th_prev / th - 1.0) / (lm * th)
    v3 = _decay_verdict(probes, np.abs(r), "ratio")
    v3.evidence["signed_ratio"] = r.tolist()

    return ScheduleReport(s.description, horizon, open_iv, v1, v2, v_o, v3)
