import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hammerstein.spaces import (
    ConjugatePair,
    DimensionError,
    GridVector,
    InvalidExponentError,
    ProductVector,
    UnsupportedConfigurationError,
    dual_norm,
    duality_map,
    inverse_duality_map,
    norm_p,
    pairing,
    product_duality,
    product_norm,
    product_pairing,
)

EXPONENTS = [1.5, 2.0, 3.0, 4.0]

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vectors = arrays(np.float64, st.integers(1, 8), elements=finite)


def test_conjugate_pair_fills_q():
    assert ConjugatePair(3.0).q == pytest.approx(1.5)
    assert ConjugatePair(2.0).is_hilbert
    assert ConjugatePair(3.0).dual().p == pytest.approx(1.5)


@pytest.mark.parametrize("p", [1.0, 0.5, -2.0])
def test_conjugate_pair_rejects_small_p(p):
    with pytest.raises(InvalidExponentError):
        ConjugatePair(p)


def test_conjugate_pair_rejects_non_conjugate_q():
    with pytest.raises(InvalidExponentError):
        ConjugatePair(2.0, 3.0)


def test_grid_vector_validation():
    with pytest.raises(DimensionError):
        GridVector([1.0, 2.0], [1.0])
    with pytest.raises(ValueError):
        GridVector([1.0, 2.0], [1.0, 0.0])
    with pytest.raises(DimensionError):
        GridVector([])
    x = GridVector([1.0, 2.0])
    with pytest.raises(ValueError):
        x.coords[0] = 5.0


@pytest.mark.parametrize(
    "coords, p, expected",
    [
        ((1.0, 1.0), 3.0, 2.0 ** (1.0 / 3.0)),
        ((0.0, 0.0), 3.0, 0.0),
        ((0.0, 0.0), 1.5, 0.0),
        ((3.0, 4.0), 2.0, 5.0),
    ],
)
def test_norm_examples(coords, p, expected):
    assert norm_p(GridVector(coords), ConjugatePair(p)) == pytest.approx(expected, abs=1e-15)


def test_weighted_norm_is_discrete_l2():
    x = GridVector([1.0, 2.0, 3.0], [0.25, 0.5, 0.25])
    assert norm_p(x, ConjugatePair(2.0)) == pytest.approx(np.sqrt(0.25 + 2.0 + 2.25))


def test_duality_map_examples():
    assert np.array_equal(duality_map(GridVector([1.0, 1.0]), ConjugatePair(2.0)).coords, [1, 1])
    p3 = ConjugatePair(3.0)
    x = GridVector([1.0, 1.0])
    jx = duality_map(x, p3)
    assert np.allclose(jx.coords, [1, 1])
    assert pairing(x, jx) == pytest.approx(2.0)
    assert norm_p(x, p3) ** 3 == pytest.approx(2.0)
    for p in EXPONENTS:
        assert np.array_equal(duality_map(GridVector([0.0, 0.0]), ConjugatePair(p)).coords, [0, 0])


def test_inverse_duality_examples():
    p3 = ConjugatePair(3.0)
    f = duality_map(GridVector([2.0, -3.0]), p3)
    assert np.allclose(f.coords, [4.0, -9.0])
    assert np.allclose(inverse_duality_map(f, p3).coords, [2.0, -3.0], rtol=1e-14)
    assert np.array_equal(inverse_duality_map(GridVector([0.0, 0.0]), p3).coords, [0, 0])


def test_weighted_non_hilbert_rejected():
    x = GridVector([1.0, 2.0], [0.5, 0.5])
    with pytest.raises(UnsupportedConfigurationError):
        duality_map(x, ConjugatePair(3.0))
    assert np.array_equal(duality_map(x, ConjugatePair(2.0)).coords, x.coords)


def test_pairing_requires_same_grid():
    with pytest.raises(DimensionError):
        pairing(GridVector([1.0, 2.0]), GridVector([1.0, 2.0, 3.0]))
    with pytest.raises(DimensionError):
        pairing(GridVector([1.0, 2.0]), GridVector([1.0, 2.0], [0.5, 0.5]))


@pytest.mark.parametrize("p", EXPONENTS)
def test_duality_identities_random(p):
    pair = ConjugatePair(p)
    rng = np.random.default_rng(7)
    for _ in range(500):
        x = GridVector(rng.standard_normal(rng.integers(1, 10)) * rng.uniform(0.1, 10))
        jx = duality_map(x, pair)
        nx = norm_p(x, pair)
        assert abs(pairing(x, jx) - nx**p) <= 1e-9 * (1 + nx**p)
        assert abs(dual_norm(jx, pair) - nx ** (p - 1)) <= 1e-9 * (1 + nx ** (p - 1))
        back = inverse_duality_map(jx, pair).coords
        assert np.max(np.abs(back - x.coords)) <= 1e-9 * (1 + np.max(np.abs(x.coords)))


@settings(max_examples=200, deadline=None)
@given(vectors, st.sampled_from(EXPONENTS), st.sampled_from([-2.0, 0.5, 3.0]))
def test_gauge_homogeneity(x, p, c):
    pair = ConjugatePair(p)
    lhs = duality_map(GridVector(c * x), pair).coords
    rhs = c * abs(c) ** (p - 2) * duality_map(GridVector(x), pair).coords
    assert np.allclose(lhs, rhs, rtol=1e-9, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(vectors, st.sampled_from(EXPONENTS))
def test_round_trip_property(x, p):
    pair = ConjugatePair(p)
    back = inverse_duality_map(duality_map(GridVector(x), pair), pair).coords
    assert np.max(np.abs(back - x)) <= 1e-9 * (1 + np.max(np.abs(x)))


@pytest.mark.parametrize(
    "u, v, p, expected",
    [
        ((1.0, 0.0), (0.0, 1.0), 2.0, np.sqrt(2.0)),
        ((0.0, 0.0), (0.0, 0.0), 2.0, 0.0),
        ((3.0, 4.0), (0.0, 0.0), 2.0, 5.0),
    ],
)
def test_product_norm_examples(u, v, p, expected):
    z = ProductVector.from_arrays(u, v)
    assert product_norm(z, ConjugatePair(p)) == pytest.approx(expected)


def test_product_duality_examples():
    z = ProductVector.from_arrays([1.0, 1.0], [1.0, 1.0])
    jz = product_duality(z, ConjugatePair(2.0))
    assert np.array_equal(jz.first.coords, [1, 1]) and np.array_equal(jz.second.coords, [1, 1])
    jz = product_duality(ProductVector.from_arrays([1.0, 1.0], [2.0, 0.0]), ConjugatePair(3.0))
    assert np.allclose(jz.first.coords, [1, 1]) and np.allclose(jz.second.coords, [4, 0])


def test_product_vector_weights_must_match():
    with pytest.raises(DimensionError):
        ProductVector(GridVector([1.0, 2.0]), GridVector([1.0, 2.0], [0.5, 0.5]))


@pytest.mark.parametrize("p", EXPONENTS)
def test_product_definitions_componentwise(p):
    pair = ConjugatePair(p)
    rng = np.random.default_rng(3)
    for _ in range(100):
        u, v = rng.standard_normal(4), rng.standard_normal(4)
        z = ProductVector.from_arrays(u, v)
        expected = (np.sum(np.abs(u) ** p) + np.sum(np.abs(v) ** p)) ** (1 / p)
        assert product_norm(z, pair) == pytest.approx(expected, rel=1e-12)
        jz = product_duality(z, pair)
        assert np.allclose(jz.first.coords, np.abs(u) ** (p - 2) * u)
        assert np.allclose(jz.second.coords, np.abs(v) ** (p - 2) * v)
        assert product_pairing(z, jz) == pytest.approx(
            np.sum(np.abs(u) ** p) + np.sum(np.abs(v) ** p), rel=1e-12
        )
