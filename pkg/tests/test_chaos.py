from itertools import product
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite_e import hermegauss

from berry.chaos import (
    ALPHA_TABLE, LENGTH_WEIGHTS, ZETA_TABLE, alpha_coeff, alpha_quadrature, beta_coeff,
    count_integrands, diagram_terms, fourth_chaos_count, fourth_chaos_length, hermite,
    hermite_product_moment, hermite_table, length_prefactor, second_chaos_length, zeta_coeff,
    zeta_quadrature,
)
from berry.errors import InvalidArgumentError, ResolutionError, UnsupportedCaseError
from berry.geometry import Grid
from berry.geometry.domains import Disk, Rectangle
from berry.sampler import WaveSpec, sample_complex, sample_wave

S2PI = np.sqrt(2 * np.pi)


def test_hermite_values():
    assert hermite(4, 0.0) == 3.0
    assert hermite(4, 1.0) == -2.0
    assert hermite(4, 2.0) == -5.0
    assert hermite(0, 7.0) == 1.0
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(hermite_table(4, x)[2], x ** 2 - 1)
    np.testing.assert_allclose(hermite_table(4, x)[3], x ** 3 - 3 * x)
    with pytest.raises(InvalidArgumentError):
        hermite(-1, 0.0)


def test_hermite_orthogonality():
    z, w = hermegauss(20)
    w = w / S2PI
    H = hermite_table(8, z)
    gram = (H * w) @ H.T
    expected = np.diag([factorial(n) for n in range(9)]).astype(float)
    np.testing.assert_allclose(gram, expected, atol=1e-10 * factorial(8))


def test_beta_coefficients():
    assert beta_coeff(0) == pytest.approx(1 / S2PI, rel=1e-15)
    assert beta_coeff(1) == 0.0
    assert beta_coeff(2) == pytest.approx(-1 / (2 * S2PI), rel=1e-15)
    assert beta_coeff(4) == pytest.approx(3 / (24 * S2PI), rel=1e-15)


@given(st.integers(0, 10), st.floats(-3, 3))
def test_beta_parity(l, z):
    assert beta_coeff(l, -z) == pytest.approx((-1) ** l * beta_coeff(l, z), abs=1e-14)


@pytest.mark.parametrize("nm", sorted(ALPHA_TABLE))
def test_alpha_quadrature_reproduces_table(nm):
    assert abs(alpha_quadrature(*nm) - ALPHA_TABLE[nm]) < 1e-8


def test_alpha_odd_and_symmetry():
    assert alpha_coeff(1, 0) == 0.0
    assert alpha_coeff(3, 2) == 0.0
    assert alpha_coeff(6, 0, method="quadrature") == pytest.approx(alpha_coeff(0, 6, method="quadrature"))


def test_zeta_parity_zero_and_table():
    assert zeta_coeff(1, 0, 0, 0) == 0.0
    assert zeta_coeff(2, 1, 1, 0) == 0.0
    assert zeta_coeff(1, 1, 1, 1) == -3 / 8
    assert zeta_coeff(0, 0, 0, 0, with_error=True) == (1.0, 0.0)


def test_zeta_quadrature_small_budget():
    keys = [(0, 0, 0, 0), (1, 1, 1, 1), (2, 0, 0, 2), (2, 2, 0, 0)]
    est = zeta_quadrature(keys, points=2 ** 21)
    for k in keys:
        v, se = est[k]
        assert abs(v - ZETA_TABLE[k]) < 5 * se + 1e-4


def test_zeta_bad_entries():
    with pytest.raises(InvalidArgumentError):
        zeta_quadrature([(1, 1, 1)])
    with pytest.raises(InvalidArgumentError):
        zeta_coeff(-2, 0, 0, 0)


def test_diagram_simple_moments():
    r = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(hermite_product_moment([4], [4], r[None, None]), 24 * r ** 4)
    np.testing.assert_allclose(hermite_product_moment([2], [2], r[None, None]), 2 * r ** 2)
    assert hermite_product_moment([3], [1], [[0.5]]) == 0.0
    assert diagram_terms((2, 1), (1,)) == ()


def test_diagram_gradient_pair_closed_form():
    # E[H2(X1)H2(X2)H2(Y1)H2(Y2)] with cross matrix [[a, c], [c, b]]
    a, b, c = 0.3, -0.2, 0.15
    R = np.array([[a, c], [c, b]])
    closed = 4 * (a * a * b * b + c ** 4 + 4 * a * b * c * c)
    assert hermite_product_moment([2, 2], [2, 2], R) == pytest.approx(closed, rel=1e-14)


def _gauss_hermite_moment(left, right, R, nodes=5):
    # tensor Gauss-Hermite on the joint law; exact for polynomials of degree < 2 * nodes
    p, q = len(left), len(right)
    cov = np.eye(p + q)
    cov[:p, p:] = R
    cov[p:, :p] = R.T
    L = np.linalg.cholesky(cov)
    z, w = hermegauss(nodes)
    w = w / S2PI
    total = 0.0
    for idx in product(range(nodes), repeat=p + q):
        g = L @ z[list(idx)]
        wt = np.prod(w[list(idx)])
        f = 1.0
        for k, d in enumerate(tuple(left) + tuple(right)):
            f *= hermite(d, g[k])
        total += wt * f
    return total


@pytest.mark.parametrize("left,right", [
    ((2, 2), (2, 2)), ((4, 0), (2, 2)), ((1, 3), (3, 1)), ((2, 1, 1), (0, 2, 2)), ((0, 1, 1), (1, 1, 0)),
])
def test_diagram_matches_gauss_hermite(left, right):
    rng = np.random.default_rng(sum(left) * 10 + len(left))
    R = rng.uniform(-1, 1, (len(left), len(right)))
    R *= 0.6 / np.linalg.norm(R, 2)
    assert hermite_product_moment(left, right, R) == pytest.approx(
        _gauss_hermite_moment(left, right, R), abs=1e-10)


def test_diagram_degree_limit():
    with pytest.raises(UnsupportedCaseError):
        diagram_terms((5,), (5,))
    with pytest.raises(InvalidArgumentError):
        hermite_product_moment([2], [2], np.zeros((2, 1)))


class _Constant:
    """Deterministic field with constant value and zero gradient."""

    def __init__(self, c, E=100.0):
        self.c, self.E = c, E

    def eval_grid(self, grid, gradient=False):
        v = np.full(grid.shape, self.c)
        return (v, np.zeros((2,) + grid.shape)) if gradient else v

    def value(self, pts):
        return np.full(np.asarray(pts).shape[:-1], self.c)

    def gradient(self, pts):
        return np.zeros(np.asarray(pts).shape)


def test_fourth_chaos_length_constant_field():
    E = 100.0
    grid = Grid(0.0, 0.0, 1 / 160, 161, 161)
    D = Rectangle(0, 0, 1, 1)
    comp = fourth_chaos_length(_Constant(0.5, E), D, grid)
    assert comp.constituents["a1"] == pytest.approx(hermite(4, 0.5), rel=1e-12)
    # H4(0) = 3 for the gradient-only constituents
    assert comp.constituents["a2"] == pytest.approx(3.0, rel=1e-12)
    assert comp.constituents["a5"] == pytest.approx(hermite(2, 0.5) * -1, rel=1e-12)
    direct = length_prefactor(E) * sum(LENGTH_WEIGHTS[n] * v for n, v in comp.constituents.items())
    assert comp.value == pytest.approx(direct, rel=1e-14)
    assert comp.reconstruct() == comp.value


def test_fourth_chaos_resolution():
    with pytest.raises(ResolutionError):
        fourth_chaos_length(_Constant(0.0, 1e4), Rectangle(0, 0, 1, 1), Grid(0, 0, 0.01, 101, 101))


def test_count_component_parts():
    E = 50.0
    c = sample_complex(WaveSpec(E=E, J=256, seed=4))
    grid = Grid(0.0, 0.0, 1 / 128, 129, 129)
    D = Rectangle(0, 0, 1, 1)
    comp = fourth_chaos_count(c, D, grid)
    assert comp.value == pytest.approx(comp.part("a") + comp.part("ahat") + comp.part("b"), rel=1e-12)
    # the a-part of the count equals the length-type functional of the real part, rescaled
    lc = fourth_chaos_length(c.real, D, grid)
    for n in lc.constituents:
        assert comp.constituents[n] == pytest.approx(lc.constituents[n], rel=1e-12)


def test_count_integrand_b10_vanishes_without_second_gradient():
    rng = np.random.default_rng(0)
    B, Bh = rng.normal(size=10), rng.normal(size=10)
    G = rng.normal(size=(2, 10))
    out = count_integrands(B, G, Bh, np.zeros((2, 10)))
    np.testing.assert_array_equal(out["b10"], 0.0)
    np.testing.assert_allclose(out["b1"], hermite(2, B) * hermite(2, Bh))


def test_second_chaos_constant_field_vanishes():
    assert second_chaos_length(_Constant(0.7, 30.0), Rectangle(0, 0, 1, 1)) == 0.0


def test_second_chaos_divergence_theorem():
    # boundary flux of B grad B equals the area integral of |grad B|^2 + B lap B
    E = 25.0
    f = sample_wave(WaveSpec(E=E, J=128, seed=9))
    D = Disk(0.1, -0.05, 0.4)
    r, wr = np.polynomial.legendre.leggauss(120)
    r = 0.5 * D.radius * (r + 1)
    wr = 0.5 * D.radius * wr
    th = 2 * np.pi * np.arange(400) / 400
    R, T = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([D.cx + R * np.cos(T), D.cy + R * np.sin(T)], -1).reshape(-1, 2)
    B = f.value(pts)
    g = f.gradient(pts)
    dens = (g ** 2).sum(-1) + B * f.laplacian(pts)
    w = (wr[:, None] * r[:, None] * np.full_like(T, 2 * np.pi / 400)).ravel()
    area = (dens * w).sum() / (8 * np.pi * np.sqrt(2 * E))
    assert second_chaos_length(f, D) == pytest.approx(area, rel=0.01)


def test_second_chaos_step_limit():
    f = sample_wave(WaveSpec(E=100.0, J=64, seed=1))
    with pytest.raises(InvalidArgumentError):
        second_chaos_length(f, Rectangle(0, 0, 1, 1), step=0.1)


@settings(max_examples=20, deadline=None)
@given(st.floats(-0.9, 0.9))
def test_fourth_order_moment_sign(r):
    # Var-type moments are non-negative for identical degree patterns
    assert hermite_product_moment([2, 2], [2, 2], np.array([[r, 0], [0, r]])) >= 0
