"""
Finite-dimensional realizations of E, E* and the product space X = E x E*.

Elements are stored as :class:`GridVector` (coordinates plus positive
quadrature weights).  With unit weights the space is plain l^p; with
general weights only p = 2 is supported, which gives a discrete L^2 whose
duality map is the identity under the weighted inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DimensionError",
    "InvalidExponentError",
    "UnsupportedConfigurationError",
    "ConjugatePair",
    "GridVector",
    "ProductVector",
    "pairing",
    "norm_p",
    "dual_norm",
    "duality_map",
    "inverse_duality_map",
    "product_norm",
    "product_duality",
    "product_pairing",
]

CONJUGATE_TOL = 1e-12


class DimensionError(ValueError):
    """Raised when two vectors or a vector and an operator do not fit together."""


class InvalidExponentError(ValueError):
    pass


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class ConjugatePair:
    """Hoelder-conjugate exponents ``1/p + 1/q = 1``.

    ``q`` is derived from ``p`` when omitted.
    """

    p: float
    q: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        p = float(self.p)
        if not np.isfinite(p) or p <= 1.0:
            raise InvalidExponentError(f"exponent p must be > 1, got {self.p!r}")
        q = p / (p - 1.0) if self.q is None else float(self.q)
        if q <= 1.0 or abs(1.0 / p + 1.0 / q - 1.0) >= CONJUGATE_TOL:
            raise InvalidExponentError(f"p={p} and q={q} are not conjugate")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @property
    def is_hilbert(self) -> bool:
        return self.p == 2.0

    def dual(self) -> "ConjugatePair":
        """The pair with the roles of p and q swapped (exponents of E*)."""
        return ConjugatePair(self.q, self.p)


def _as_readonly(values, name) -> np.ndarray:
    arr = np.array(values, dtype=float, ndmin=1)
    if arr.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridVector:
    """Coordinates together with quadrature weights.

    ``weights`` defaults to all ones, i.e. the vector lives in l^p.
    """

    coords: np.ndarray
    weights: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        coords = _as_readonly(self.coords, "coords")
        if coords.size == 0:
            raise DimensionError("a GridVector needs at least one coordinate")
        if self.weights is None:
            weights = np.ones_like(coords)
            weights.setflags(write=False)
        else:
            weights = _as_readonly(self.weights, "weights")
        if weights.shape != coords.shape:
            raise DimensionError(
                f"coords has length {coords.size} but weights has length {weights.size}"
            )
        if not np.all(weights > 0):
            raise DimensionError("all quadrature weights must be positive")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "weights", weights)

    def __len__(self):
        return self.coords.size

    def __repr__(self):
        return f"GridVector({self.coords.tolist()!r})" if self.unit_weights else (
            f"GridVector(coords={self.coords.tolist()!r}, weights={self.weights.tolist()!r})"
        )

    @property
    def unit_weights(self) -> bool:
        return bool(np.all(self.weights == 1.0))

    def like(self, coords) -> "GridVector":
        """New vector on the same grid (same weights) with ``coords``."""
        return GridVector(coords, self.weights)

    def zeros_like(self) -> "GridVector":
        return self.like(np.zeros_like(self.coords))

    def allclose(self, other: "GridVector", rtol=1e-12, atol=1e-12) -> bool:
        return np.allclose(self.coords, other.coords, rtol=rtol, atol=atol)


def _check_same_grid(x: GridVector, y: GridVector):
    if len(x) != len(y):
        raise DimensionError(f"length mismatch: {len(x)} vs {len(y)}")
    if not np.array_equal(x.weights, y.weights):
        raise DimensionError("vectors carry different quadrature weights")


def _require_supported(x: GridVector, pair: ConjugatePair):
    if not x.unit_weights and not pair.is_hilbert:
        raise UnsupportedConfigurationError(
            "weighted grids are only supported for p = 2 (discrete L^2)"
        )


def _lp(coords: np.ndarray, weights: np.ndarray, r: float) -> float:
    if r == 2.0:
        return float(np.sqrt(np.sum(weights * coords * coords)))
    # scale out the largest entry to avoid overflow for large r
    m = np.max(np.abs(coords))
    if m == 0.0:
        return 0.0
    return float(m * np.sum(weights * (np.abs(coords) / m) ** r) ** (1.0 / r))


def pairing(x: GridVector, f: GridVector) -> float:
    """Duality pairing ``<x, f> = sum_i w_i x_i f_i``."""
    _check_same_grid(x, f)
    return float(np.sum(x.weights * x.coords * f.coords))


def norm_p(x: GridVector, pair: ConjugatePair) -> float:
    """Weighted p-norm ``(sum_i w_i |x_i|^p)^(1/p)`` of an element of E."""
    return _lp(x.coords, x.weights, pair.p)


def dual_norm(f: GridVector, pair: ConjugatePair) -> float:
    """Norm of an element of E* (the conjugate q-norm)."""
    return _lp(f.coords, f.weights, pair.q)


def _gauge_power(coords: np.ndarray, r: float) -> np.ndarray:
    """Pointwise ``|c|^(r-2) c`` with the convention 0 -> 0."""
    if r == 2.0:
        return coords.copy()
    out = np.zeros_like(coords)
    nz = coords != 0.0
    out[nz] = np.abs(coords[nz]) ** (r - 2.0) * coords[nz]
    return out


def duality_map(x: GridVector, pair: ConjugatePair) -> GridVector:
    """Generalized duality map J^E with gauge ``t^(p-1)``.

    On l^p this is ``J(x)_i = |x_i|^(p-2) x_i``; it satisfies
    ``<x, Jx> = ||x||_p^p`` and ``||Jx||_q = ||x||_p^(p-1)``.  For p = 2
    it is the identity.
    """
    _require_supported(x, pair)
    return x.like(_gauge_power(x.coords, pair.p))


def inverse_duality_map(f: GridVector, pair: ConjugatePair) -> GridVector:
    """J^{E*}, the inverse of :func:`duality_map`: ``|f_i|^(q-2) f_i``."""
    _require_supported(f, pair)
    return f.like(_gauge_power(f.coords, pair.q))


@dataclass(frozen=True, eq=False)
class ProductVector:
    """An element ``(u, v)`` of X = E x E*."""

    first: GridVector
    second: GridVector

    def __post_init__(self):
        if not np.array_equal(self.first.weights, self.second.weights):
            raise DimensionError("both halves of a ProductVector must share weights")

    @classmethod
    def from_arrays(cls, u, v, weights=None) -> "ProductVector":
        return cls(GridVector(u, weights), GridVector(v, weights))


def product_norm(z: ProductVector, pair: ConjugatePair) -> float:
    r"""``(||u||^p + ||v||^p)^(1/p)``; both halves use the weighted p-norm."""
    p = pair.p
    a = norm_p(z.first, pair)
    b = norm_p(z.second, pair)
    return float((a**p + b**p) ** (1.0 / p))


def product_duality(z: ProductVector, pair: ConjugatePair) -> ProductVector:
    return ProductVector(duality_map(z.first, pair), duality_map(z.second, pair))


def product_pairing(z1: ProductVector, z2: ProductVector) -> float:
    """``<z1, z2> = <u1, u2> + <v1, v2>``."""
    return pairing(z1.first, z2.first) + pairing(z1.second, z2.second)
