"""
Evaluable operators between E and E*: dense matrices, sine-type Nemytskii
(superposition) operators, Nystroem-discretized integral operators, and the
product operator ``A(u, v) = (Fu - v, Kv + u)`` on X = E x E*.

Every operator acts on plain coordinate arrays of shape ``(..., n)`` so a
batch of samples can be evaluated in one call; :func:`apply` wraps this for
:class:`~hammerstein.spaces.GridVector` inputs.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .spaces import (
    ConjugatePair,
    DimensionError,
    GridVector,
    ProductVector,
)

__all__ = [
    "MatrixOperator",
    "NemytskiiOperator",
    "IntegralOperator",
    "ProductOperator",
    "MonotonicityReport",
    "MonotonicityWarning",
    "apply",
    "apply_product",
    "estimate_monotonicity_constant",
    "monotonicity_report",
    "symmetric_part_min_eig",
    "verify_product_monotonicity",
]


class MonotonicityWarning(UserWarning):
    """Emitted when sampling finds no positive monotonicity constant."""


def _check_last_dim(x: np.ndarray, n: int):
    if x.shape[-1] != n:
        raise DimensionError(f"operator expects length {n}, got {x.shape[-1]}")


class MatrixOperator:
    """``x -> M x`` for a dense square matrix ``M``.

    Parameters
    ----------
    entries : array_like, shape (n, n)
    claimed_eta, claimed_p : float, optional
        Strong-monotonicity constant and exponent the caller asserts for the
        operator.  They are metadata only; nothing checks them on
        construction.
    """

    def __init__(self, entries, claimed_eta=None, claimed_p=None):
        m = np.array(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"matrix operator needs a square matrix, got shape {m.shape}")
        m.setflags(write=False)
        self.entries = m
        self.claimed_eta = None if claimed_eta is None else float(claimed_eta)
        self.claimed_p = None if claimed_p is None else float(claimed_p)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_last_dim(x, self.dim)
        return x @ self.entries.T

    def __repr__(self):
        return f"MatrixOperator({self.entries.tolist()!r})"

    def to_dict(self):
        d = {"entries": self.entries.tolist()}
        if self.claimed_eta is not None:
            d["claimed_eta"] = self.claimed_eta
        if self.claimed_p is not None:
            d["claimed_p"] = self.claimed_p
        return d

    @classmethod
    def from_dict(cls, d):
        if isinstance(d, dict):
            return cls(d["entries"], d.get("claimed_eta"), d.get("claimed_p"))
        return cls(d)

    @classmethod
    def from_json(cls, path):
        """Load a row-major dense matrix, either bare or as ``{"entries": ...}``."""
        return cls.from_dict(json.loads(Path(path).read_text()))


class NemytskiiOperator:
    """Pointwise operator ``(Fu)_i = a^2 sin(u_i - g_i)``.

    Parameters
    ----------
    amplitude_a : float
    offset_g : array_like
        The shift ``g`` at each grid node.
    nodes : array_like, optional
        Grid nodes; only carried along for ``pointwise_fn`` and export.
    """

    def __init__(self, amplitude_a, offset_g, nodes=None):
        g = np.array(offset_g, dtype=float, ndmin=1)
        g.setflags(write=False)
        self.amplitude_a = float(amplitude_a)
        self.offset_g = g
        if nodes is not None:
            nodes = np.array(nodes, dtype=float)
            if nodes.shape != g.shape:
                raise DimensionError("offset_g length must equal the grid length")
        self.nodes = nodes

    @property
    def dim(self) -> int:
        return self.offset_g.size

    def pointwise_fn(self, t, u):
        """f(t, u) = a^2 sin(u - g(t)); g is interpolated linearly between nodes."""
        if self.nodes is None:
            raise ValueError("pointwise_fn needs the grid nodes")
        return self.amplitude_a**2 * np.sin(u - np.interp(t, self.nodes, self.offset_g))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_last_dim(x, self.dim)
        return self.amplitude_a**2 * np.sin(x - self.offset_g)

    def derivative_diag(self, x):
        """Diagonal of the Jacobian, ``a^2 cos(u - g)``."""
        return self.amplitude_a**2 * np.cos(np.asarray(x, dtype=float) - self.offset_g)


class IntegralOperator:
    """Nystroem discretization ``(Kv)_i = sum_j w_j k(t_i, x_j) v_j``."""

    def __init__(self, kernel_matrix, weights):
        k = np.array(kernel_matrix, dtype=float)
        w = np.array(weights, dtype=float, ndmin=1)
        if k.ndim != 2 or k.shape[1] != w.size:
            raise DimensionError(
                f"kernel matrix columns ({k.shape}) must match weights length {w.size}"
            )
        k.setflags(write=False)
        w.setflags(write=False)
        self.kernel_matrix = k
        self.weights = w
        self._weighted = k * w

    @property
    def dim(self) -> int:
        return self.kernel_matrix.shape[1]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        _check_last_dim(x, self.dim)
        return x @ self._weighted.T


class ProductOperator:
    """``A(u, v) = (F u - v, K v + u)`` for ``F: E -> E*`` and ``K: E* -> E``."""

    def __init__(self, f_op, k_op):
        if f_op.dim != k_op.dim:
            raise DimensionError(f"F output dimension {f_op.dim} != K input dimension {k_op.dim}")
        self.f_op = f_op
        self.k_op = k_op

    @property
    def dim(self) -> int:
        return self.f_op.dim

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        return self.f_op(u) - v, self.k_op(v) + u


def apply(op, x: GridVector) -> GridVector:
    """Evaluate ``op`` at ``x``; the result lives on the same grid."""
    return x.like(op(x.coords))


def apply_product(A: ProductOperator, z: ProductVector) -> ProductVector:
    first, second = A(z.first.coords, z.second.coords)
    return ProductVector(z.first.like(first), z.second.like(second))


def symmetric_part_min_eig(op: MatrixOperator) -> float:
    """Smallest eigenvalue of ``(M + M^T)/2``.

    For a linear operator on Euclidean space this is the exact (2, eta)
    strong-monotonicity constant.
    """
    m = op.entries
    return float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])


def _sample_pairs(rng, samples, dim, box):
    lo, hi = box
    x = rng.uniform(lo, hi, size=(samples, dim))
    y = rng.uniform(lo, hi, size=(samples, dim))
    keep = np.any(x != y, axis=1)
    return x[keep], y[keep]


def _monotonicity_ratios(op, pair, samples, seed, box, weights):
    if samples < 2:
        raise ValueError("need at least 2 samples")
    p = pair.p
    rng = np.random.default_rng(seed)
    if isinstance(op, ProductOperator):
        n = op.dim
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        x, y = _sample_pairs(rng, samples, 2 * n, box)
        du, dv = x[:, :n] - y[:, :n], x[:, n:] - y[:, n:]
        ax, bx = op(x[:, :n], x[:, n:])
        ay, by = op(y[:, :n], y[:, n:])
        num = np.sum(w * du * (ax - ay), axis=1) + np.sum(w * dv * (bx - by), axis=1)
        norm_u = np.sum(w * np.abs(du) ** p, axis=1)
        norm_v = np.sum(w * np.abs(dv) ** p, axis=1)
        den = norm_u + norm_v
    else:
        n = op.dim
        w = np.ones(n) if weights is None else np.asarray(weights, dtype=float)
        x, y = _sample_pairs(rng, samples, n, box)
        d = x - y
        num = np.sum(w * d * (op(x) - op(y)), axis=1)
        den = np.sum(w * np.abs(d) ** p, axis=1)
    return num / den


def estimate_monotonicity_constant(
    op, pair: ConjugatePair, samples=10_000, seed=0, box=(-1.0, 1.0), weights=None
) -> float:
    """Empirical strong-monotonicity constant.

    Returns ``min <x - y, op(x) - op(y)> / ||x - y||^p`` over ``samples``
    pairs drawn uniformly from ``box^n`` (``box^(2n)`` for a
    :class:`ProductOperator`, with the product norm).  This is an upper
    bound on the true constant over the box; a non-positive result means a
    monotonicity violation was observed.  Coincident pairs are discarded.

    ``weights`` selects the weighted pairing and norm (discrete L^2 grids).
    """
    ratios = _monotonicity_ratios(op, pair, samples, seed, box, weights)
    return float(np.min(ratios))


@dataclass(frozen=True)
class MonotonicityReport:
    eta_hat: float
    eta_expected: float | None
    samples: int
    satisfied: bool
    warning: str = ""

    def to_dict(self):
        return {
            "eta_hat": self.eta_hat,
            "eta_expected": self.eta_expected,
            "samples": self.samples,
            "satisfied": self.satisfied,
            "warning": self.warning,
        }


def monotonicity_report(
    op, pair: ConjugatePair, samples=10_000, seed=0, box=(-1.0, 1.0), weights=None,
    eta_expected=None, tol=1e-6,
) -> MonotonicityReport:
    """Like :func:`estimate_monotonicity_constant` but never hides a failure.

    ``satisfied`` is ``eta_hat >= eta_expected - tol`` when an expected
    constant is given, otherwise ``eta_hat > 0``.  A non-positive estimate
    sets ``warning`` and emits a :class:`MonotonicityWarning`.
    """
    eta_hat = estimate_monotonicity_constant(op, pair, samples, seed, box, weights)
    if eta_expected is None:
        ok = eta_hat > 0
    else:
        ok = eta_hat >= eta_expected - tol
    msg = ""
    if eta_hat <= 0:
        msg = (
            f"no strong monotonicity on box {tuple(box)}: sampled eta_hat = {eta_hat:.6g} <= 0"
        )
        warnings.warn(msg, MonotonicityWarning, stacklevel=2)
    return MonotonicityReport(eta_hat, eta_expected, samples, bool(ok), msg)


def _component_eta(op, pair, samples, seed, box, weights):
    if getattr(op, "claimed_eta", None) is not None:
        return op.claimed_eta
    if isinstance(op, MatrixOperator) and pair.is_hilbert and weights is None:
        return symmetric_part_min_eig(op)
    return estimate_monotonicity_constant(op, pair, samples, seed, box, weights)


def verify_product_monotonicity(
    A: ProductOperator, pair: ConjugatePair, samples=10_000, seed=0,
    box=(-1.0, 1.0), weights=None, eta1=None, eta2=None,
) -> MonotonicityReport:
    """Sample ``<z1 - z2, A z1 - A z2> / ||z1 - z2||_X^p`` against ``min(eta1, eta2)``.

    Component constants default to the operators' ``claimed_eta``, then to the
    exact symmetric-part eigenvalue for matrices at p = 2, then to a sampled
    estimate.
    """
    if eta1 is None:
        eta1 = _component_eta(A.f_op, pair, samples, seed, box, weights)
    if eta2 is None:
        eta2 = _component_eta(A.k_op, pair, samples, seed + 1, box, weights)
    return monotonicity_report(
        A, pair, samples, seed, box, weights, eta_expected=min(eta1, eta2)
    )
