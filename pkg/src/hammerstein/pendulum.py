"""
Forced pendulum ``v'' + a^2 sin v = z`` on [0, 1] with ``v(0) = v(1) = 0``,
rewritten as a Hammerstein equation through the Green function of
``v'' = 0`` with the same boundary conditions.

Sign conventions.  ``G(t, x) = t (x - 1)`` for ``t <= x`` and ``x (t - 1)``
otherwise, so ``w -> int G w`` solves ``v'' = w``.  The pendulum is then

    v = int G (z - a^2 sin v) = g - K(a^2 sin v),     g = int G z.

With ``offset = -g`` (the forcing integrated against the nonnegative kernel
``-G``) and ``v = u - offset = u + g`` this is ``u + K F u = 0`` for the
Nemytskii operator ``(F u)(x) = a^2 sin(u(x) - offset(x))``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .operators import IntegralOperator, NemytskiiOperator
from .schedules import make_schedule
from .solver import IterationTrace, SolveConfig, solve_hammerstein
from .spaces import ConjugatePair, GridVector, UnsupportedConfigurationError

__all__ = [
    "GreenFunction",
    "PendulumProblem",
    "DiscretizedHammerstein",
    "PendulumSolution",
    "build_green_function",
    "solve_green_conditions",
    "uniform_grid",
    "trapezoid_weights",
    "green_kernel_matrix",
    "compute_g",
    "assemble_hammerstein",
    "verify_green",
    "second_difference",
    "default_solve_config",
    "solve_pendulum",
]


def solve_green_conditions(x):
    """Coefficients ``(A, B, C, D)`` of the two-branch Green function at ``x``.

    Solves the linear conditions

        G(0, x) = 0:               A = 0
        G(1, x) = 0:               C + D = 0
        continuity at t = x:       (C - A) + (D - B) x = 0
        unit jump of dG/dt at x:   D - B = 1

    for every entry of ``x`` (batched 4x4 solve).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = np.zeros(x.shape + (4, 4))
    rhs = np.zeros(x.shape + (4,))
    m[..., 0, 0] = 1.0
    m[..., 1, 2] = m[..., 1, 3] = 1.0
    m[..., 2, 0], m[..., 2, 1], m[..., 2, 2], m[..., 2, 3] = -1.0, -x, 1.0, x
    m[..., 3, 1], m[..., 3, 3] = -1.0, 1.0
    rhs[..., 3] = 1.0
    sol = np.linalg.solve(m, rhs[..., None])[..., 0]
    return tuple(sol[..., k] for k in range(4))


@dataclass(frozen=True)
class GreenFunction:
    """Green function of ``v'' = w``, ``v(0) = v(1) = 0``.

    ``G(t, x) = A(x) + B(x) t`` for ``t <= x`` and ``C(x) + D(x) t``
    for ``t > x``.
    """

    def coefficients(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros_like(x), x - 1.0, -x, x

    def __call__(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        a, b, c, d = self.coefficients(x)
        return np.where(t <= x, a + b * t, c + d * t)

    def dt(self, x, side):
        """``dG/dt`` on the ``"left"`` (t < x) or ``"right"`` (t > x) branch."""
        _, b, _, d = self.coefficients(x)
        return b if side == "left" else d


def build_green_function() -> GreenFunction:
    return GreenFunction()


def uniform_grid(n: int) -> np.ndarray:
    if n < 3:
        raise ValueError("need at least 3 grid nodes")
    return np.linspace(0.0, 1.0, int(n))


def trapezoid_weights(grid) -> np.ndarray:
    """Composite trapezoid weights; they sum to ``grid[-1] - grid[0]``."""
    t = np.asarray(grid, dtype=float)
    h = np.diff(t)
    if np.any(h <= 0):
        raise ValueError("grid must be strictly increasing")
    w = np.zeros_like(t)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def green_kernel_matrix(g: GreenFunction, grid, x_grid=None) -> np.ndarray:
    """``M[i, j] = G(t_i, x_j)``; the second grid defaults to the first."""
    t = np.asarray(grid, dtype=float)
    x = t if x_grid is None else np.asarray(x_grid, dtype=float)
    return g(t[:, None], x[None, :])


def compute_g(z, grid, weights=None, green: GreenFunction | None = None) -> GridVector:
    """Trapezoid approximation of ``g(t_i) = int_0^1 G(t_i, x) z(x) dx``.

    ``z`` is a callable or an array of values at the grid nodes.
    """
    t = np.asarray(grid, dtype=float)
    w = trapezoid_weights(t) if weights is None else np.asarray(weights, dtype=float)
    zv = np.asarray(z(t) if callable(z) else z, dtype=float) * np.ones_like(t)
    kernel = green_kernel_matrix(green or build_green_function(), t)
    return GridVector(kernel @ (w * zv), w)


def _forcing_from_spec(spec) -> Callable:
    kind = spec.get("kind", "sine")
    c = float(spec.get("c", 0.1))
    if kind == "sine":
        return lambda x: c * np.sin(2 * np.pi * np.asarray(x, dtype=float))
    if kind == "zero":
        return lambda x: np.zeros_like(np.asarray(x, dtype=float))
    if kind == "constant":
        return lambda x: np.full_like(np.asarray(x, dtype=float), c)
    raise ValueError(f"unknown forcing kind {kind!r}")


@dataclass
class PendulumProblem:
    """``v'' + a^2 sin v = z`` on a uniform grid of ``grid_size`` nodes.

    The default forcing is ``z(x) = c sin(2 pi x)``, odd about ``x = 1/2``.
    """

    amplitude_a: float = 0.5
    forcing_z: Callable = None  # type: ignore[assignment]
    grid_size: int = 101
    forcing_spec: dict = field(default_factory=lambda: {"kind": "sine", "c": 0.1})

    def __post_init__(self):
        if self.amplitude_a == 0:
            raise ValueError("amplitude a must be nonzero")
        if int(self.grid_size) < 3:
            raise ValueError("grid_size must be at least 3")
        self.grid_size = int(self.grid_size)
        if self.forcing_z is None:
            self.forcing_z = _forcing_from_spec(self.forcing_spec)

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.grid_size)

    def to_dict(self):
        return {"a": self.amplitude_a, "forcing": self.forcing_spec, "n": self.grid_size}

    @classmethod
    def from_dict(cls, d):
        spec = d.get("forcing", {"kind": "sine", "c": 0.1})
        return cls(float(d.get("a", 0.5)), None, int(d.get("n", 101)), dict(spec))

    @classmethod
    def from_json(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class DiscretizedHammerstein:
    grid: np.ndarray
    weights: np.ndarray
    k_op: IntegralOperator
    f_op: NemytskiiOperator
    g_vec: GridVector

    def amplitude(self, u) -> GridVector:
        """Recover the pendulum amplitude ``v = u - offset = u + g``."""
        u = u.coords if isinstance(u, GridVector) else np.asarray(u, dtype=float)
        return GridVector(u - self.f_op.offset_g, self.weights)


def assemble_hammerstein(prob: PendulumProblem) -> DiscretizedHammerstein:
    green = build_green_function()
    t = prob.grid
    w = trapezoid_weights(t)
    g_vec = compute_g(prob.forcing_z, t, w, green)
    k_op = IntegralOperator(green_kernel_matrix(green, t), w)
    f_op = NemytskiiOperator(prob.amplitude_a, -g_vec.coords, t)
    return DiscretizedHammerstein(t, w, k_op, f_op, g_vec)


def _uniform_step(t) -> float:
    h = np.diff(t)
    if not np.allclose(h, h[0], rtol=1e-12, atol=0):
        raise UnsupportedConfigurationError("a uniform grid is required")
    return float(h[0])


def second_difference(values, grid) -> np.ndarray:
    """Central second difference at the interior nodes of a uniform grid."""
    t = np.asarray(grid, dtype=float)
    h = _uniform_step(t)
    v = np.asarray(values, dtype=float)
    return (v[:-2] - 2.0 * v[1:-1] + v[2:]) / h**2


def verify_green(g: GreenFunction, w, grid) -> float:
    """Max interior mismatch between the second difference of ``int G w`` and ``w``."""
    t = np.asarray(grid, dtype=float)
    if t.size < 5:
        raise ValueError("need at least 5 grid nodes")
    _uniform_step(t)
    v = compute_g(w, t, green=g).coords
    wv = np.asarray(w(t) if callable(w) else w, dtype=float) * np.ones_like(t)
    return float(np.max(np.abs(second_difference(v, t) - wv[1:-1])))


@dataclass(eq=False)
class PendulumSolution:
    amplitude: GridVector
    u: GridVector
    trace: IterationTrace
    ode_residual: float


def default_solve_config(n: int, tolerance=1e-10, max_iter=5000, weights=None) -> SolveConfig:
    """p = 2 on the trapezoid-weighted grid, power-law schedule, u1 = 0, v1 = F(u1)."""
    w = trapezoid_weights(uniform_grid(n)) if weights is None else weights
    return SolveConfig(
        pair=ConjugatePair(2.0),
        tolerance=tolerance,
        max_iter=max_iter,
        schedule=make_schedule("power_law", a=0.6, b=0.25, scale=0.49),
        u1=GridVector(np.zeros(n), w),
    )


def solve_pendulum(prob: PendulumProblem, cfg: SolveConfig | None = None) -> PendulumSolution:
    """Solve the discretized Hammerstein equation and map back to ``v``.

    ``ode_residual`` is ``max |v''_i + a^2 sin v_i - z(t_i)|`` over interior
    nodes with central differences.  A :class:`~hammerstein.solver.DivergenceError`
    from the solver propagates with its partial trace.
    """
    disc = assemble_hammerstein(prob)
    if cfg is None:
        cfg = default_solve_config(prob.grid_size, weights=disc.weights)
    if not cfg.pair.is_hilbert:
        raise UnsupportedConfigurationError("the pendulum problem is posed in discrete L^2 (p = 2)")
    if not np.array_equal(cfg.u1.weights, disc.weights):
        cfg = SolveConfig(
            cfg.pair, cfg.tolerance, cfg.max_iter, cfg.schedule,
            GridVector(cfg.u1.coords, disc.weights),
            None if cfg.v1 is None else GridVector(cfg.v1.coords, disc.weights),
        )
    trace = solve_hammerstein(disc.f_op, disc.k_op, cfg)
    v = disc.amplitude(trace.final_u)
    t = disc.grid
    a2 = prob.amplitude_a**2
    z = np.asarray(prob.forcing_z(t), dtype=float) * np.ones_like(t)
    res = second_difference(v.coords, t) + a2 * np.sin(v.coords[1:-1]) - z[1:-1]
    return PendulumSolution(v, trace.final_u, trace, float(np.max(np.abs(res))))
