"""
Coupled regularized iteration for Hammerstein equations ``u + K F u = 0``.

With ``J = J^E`` and ``J* = J^{E*}`` the generalized duality maps, the
iteration is::

    u_{n+1} = J*( J u_n - lam_n (F u_n - v_n + theta_n (J u_n - J u_1)) )
    v_{n+1} = J ( J* v_n - lam_n (K v_n + u_n + theta_n (J* v_n - J* v_1)) )

In a Hilbert space both maps are the identity and the update reduces to
:func:`hilbert_step`.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .schedules import Schedule, make_schedule
from .spaces import (
    ConjugatePair,
    DimensionError,
    GridVector,
    UnsupportedConfigurationError,
    _gauge_power,
    _lp,
)

__all__ = [
    "DivergenceError",
    "NonuniqueSolutionError",
    "SolveConfig",
    "IterationStep",
    "IterationTrace",
    "LinearSolution",
    "DIVERGENCE_BOUND",
    "banach_step",
    "hilbert_step",
    "solve_hammerstein",
    "residual",
    "direct_linear_solution",
]

log = logging.getLogger(__name__)

DIVERGENCE_BOUND = 1e12


class DivergenceError(RuntimeError):
    """The iteration blew up; ``trace`` holds every step recorded before that."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


class NonuniqueSolutionError(ValueError):
    pass


@dataclass
class SolveConfig:
    """Parameters of one run.

    ``v1`` defaults to ``F(u1)`` when left as ``None``; the solver fills it in.
    """

    pair: ConjugatePair
    tolerance: float
    max_iter: int
    schedule: Schedule
    u1: GridVector
    v1: GridVector | None = None

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if int(self.max_iter) < 1:
            raise ValueError("max_iter must be at least 1")
        self.max_iter = int(self.max_iter)
        if not isinstance(self.u1, GridVector):
            self.u1 = GridVector(self.u1)
        if self.v1 is not None and not isinstance(self.v1, GridVector):
            self.v1 = GridVector(self.v1, self.u1.weights)
        if self.v1 is not None and len(self.v1) != len(self.u1):
            raise DimensionError("u1 and v1 must have the same length")

    def to_dict(self):
        d = {
            "p": self.pair.p,
            "tolerance": self.tolerance,
            "max_iter": self.max_iter,
            "schedule": self.schedule.to_dict(),
            "u1": self.u1.coords.tolist(),
            "v1": None if self.v1 is None else self.v1.coords.tolist(),
        }
        if not self.u1.unit_weights:
            d["weights"] = self.u1.weights.tolist()
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d):
        weights = d.get("weights")
        v1 = d.get("v1")
        return cls(
            pair=ConjugatePair(d.get("p", 2.0)),
            tolerance=float(d.get("tolerance", 1e-4)),
            max_iter=int(d.get("max_iter", 1000)),
            schedule=make_schedule(d.get("schedule", {"kind": "paper_experiment"})),
            u1=GridVector(d["u1"], weights),
            v1=None if v1 is None else GridVector(v1, weights),
        )

    @classmethod
    def from_json(cls, text_or_path):
        if isinstance(text_or_path, Path) or not str(text_or_path).lstrip().startswith("{"):
            text_or_path = Path(text_or_path).read_text()
        return cls.from_dict(json.loads(text_or_path))


@dataclass(frozen=True, eq=False)
class IterationStep:
    n: int
    u: np.ndarray
    v: np.ndarray
    du_norm: float
    dv_norm: float
    residual: float


@dataclass(eq=False)
class IterationTrace:
    steps: list = field(default_factory=list)
    converged: bool = False
    final_u: GridVector | None = None
    final_v: GridVector | None = None

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def column(self, name) -> np.ndarray:
        return np.array([getattr(s, name) for s in self.steps])

    def to_csv(self, path=None) -> str:
        """Columns ``n, du_norm, dv_norm, residual`` with 10 significant digits."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "du_norm", "dv_norm", "residual"])
        for s in self.steps:
            writer.writerow([s.n, f"{s.du_norm:.10g}", f"{s.dv_norm:.10g}", f"{s.residual:.10g}"])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text


def _check_weights(weights, pair):
    if not np.all(weights == 1.0) and not pair.is_hilbert:
        raise UnsupportedConfigurationError(
            "weighted grids are only supported for p = 2 (discrete L^2)"
        )


def banach_step(F, K, u, v, u1, v1, lam, theta, pair: ConjugatePair):
    """One step of the duality-map iteration on coordinate arrays."""
    p, q = pair.p, pair.q
    ju, ju1 = _gauge_power(u, p), _gauge_power(u1, p)
    jv, jv1 = _gauge_power(v, q), _gauge_power(v1, q)
    u_next = _gauge_power(ju - lam * (F(u) - v + theta * (ju - ju1)), q)
    v_next = _gauge_power(jv - lam * (K(v) + u + theta * (jv - jv1)), p)
    return u_next, v_next


def hilbert_step(F, K, u, v, u1, v1, lam, theta):
    """The same step with both duality maps replaced by the identity."""
    u_next = u - lam * (F(u) - v + theta * (u - u1))
    v_next = v - lam * (K(v) + u + theta * (v - v1))
    return u_next, v_next


def residual(F, K, u: GridVector, pair: ConjugatePair | None = None) -> float:
    """``||u + K(F(u))||`` in the p-norm of E (p = 2 when ``pair`` is omitted)."""
    p = 2.0 if pair is None else pair.p
    return _lp(u.coords + K(F(u.coords)), u.weights, p)


def solve_hammerstein(F, K, cfg: SolveConfig, method="banach") -> IterationTrace:
    """Run the coupled iteration from ``(cfg.u1, cfg.v1)``.

    Stops as soon as ``max(||u_{n+1} - u_n||, ||v_{n+1} - v_n||) < tolerance``
    or after ``max_iter`` steps.  Norms are the p-norm on E for u and the
    dual q-norm for v.

    Parameters
    ----------
    F, K : callables on coordinate arrays
        ``F: E -> E*`` and ``K: E* -> E``.
    cfg : SolveConfig
    method : {"banach", "hilbert"}
        ``"hilbert"`` uses :func:`hilbert_step` and requires p = 2.

    Raises
    ------
    DivergenceError
        If an iterate becomes non-finite or exceeds ``DIVERGENCE_BOUND`` in
        max-norm.
    """
    pair = cfg.pair
    weights = cfg.u1.weights
    _check_weights(weights, pair)
    if method == "hilbert" and not pair.is_hilbert:
        raise UnsupportedConfigurationError("the Hilbert update requires p = 2")
    if method not in ("banach", "hilbert"):
        raise ValueError(f"unknown method {method!r}")

    u1 = cfg.u1.coords.copy()
    v1 = F(u1) if cfg.v1 is None else cfg.v1.coords.copy()
    if np.shape(F(u1)) != u1.shape or np.shape(K(v1)) != v1.shape:
        raise DimensionError("operators do not match the starting point")
    u, v = u1.copy(), v1.copy()

    trace = IterationTrace()
    for n in range(1, cfg.max_iter + 1):
        lam = float(cfg.schedule.lam(n))
        theta = float(cfg.schedule.theta(n))
        if method == "hilbert":
            u_next, v_next = hilbert_step(F, K, u, v, u1, v1, lam, theta)
        else:
            u_next, v_next = banach_step(F, K, u, v, u1, v1, lam, theta, pair)

        step = IterationStep(
            n=n,
            u=u,
            v=v,
            du_norm=_lp(u_next - u, weights, pair.p),
            dv_norm=_lp(v_next - v, weights, pair.q),
            residual=_lp(u + K(F(u)), weights, pair.p),
        )
        trace.steps.append(step)

        bad = not (np.all(np.isfinite(u_next)) and np.all(np.isfinite(v_next)))
        if bad or max(np.max(np.abs(u_next)), np.max(np.abs(v_next))) > DIVERGENCE_BOUND:
            trace.final_u = GridVector(u, weights)
            trace.final_v = GridVector(v, weights)
            raise DivergenceError(f"iterates diverged at step n={n}", trace)

        u, v = u_next, v_next
        if max(step.du_norm, step.dv_norm) < cfg.tolerance:
            trace.converged = True
            break

    log.debug("stopped after %d steps (converged=%s)", trace.iterations, trace.converged)
    trace.final_u = GridVector(u, weights)
    trace.final_v = GridVector(v, weights)
    return trace


@dataclass(frozen=True)
class LinearSolution:
    u: GridVector
    determinant: float
    condition: float


def direct_linear_solution(F, K, rhs=None, cond_limit=1e12) -> LinearSolution:
    """Solve ``(I + K F) u = rhs`` directly for matrix operators.

    With ``rhs`` omitted this is the homogeneous equation whose unique solution
    is ``u = 0`` whenever ``I + K F`` is nonsingular.

    Raises
    ------
    NonuniqueSolutionError
        If ``I + K F`` is numerically singular: its smallest singular value
        is below ``(1 + ||K|| ||F||) / cond_limit``.
    """
    f = np.asarray(getattr(F, "entries", F), dtype=float)
    k = np.asarray(getattr(K, "entries", K), dtype=float)
    if f.shape != k.shape or f.shape[0] != f.shape[1]:
        raise DimensionError(f"incompatible shapes {f.shape} and {k.shape}")
    m = np.eye(f.shape[0]) + k @ f
    sv = np.linalg.svd(m, compute_uv=False)
    # judge singularity against the size of the summands, not of I + KF itself
    scale = 1.0 + np.linalg.norm(k, 2) * np.linalg.norm(f, 2)
    cond = np.inf if sv[-1] == 0 else float(scale / sv[-1])
    if cond > cond_limit:
        raise NonuniqueSolutionError(f"I + KF is singular (relative condition {cond:.3g})")
    b = np.zeros(f.shape[0]) if rhs is None else np.asarray(rhs, dtype=float)
    return LinearSolution(GridVector(np.linalg.solve(m, b)), float(np.linalg.det(m)), cond)
