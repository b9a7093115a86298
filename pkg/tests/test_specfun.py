import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from berry.errors import InvalidArgumentError
from berry.specfun import (
    asymptotic_leading, bessel_j, bessel_jn_all, kernel_arrays, kernel_r, kernel_set, wavenumber,
)

# frozen from mpmath.besselj at 40 digits
POINTS = [0.0, 0.5, 1.0, 2.404825557695773, 5.0, 11.9, 12.1, 20.0, 37.5, 100.0, 1234.5]
ORACLE = {
    0: [1.0, 0.9384698072408129, 0.7651976865579666, -6.10876525973673e-17, -0.1775967713143383,
        0.025049441699589645, 0.06966677360680731, 0.16702466434058316, 0.07172270511060223,
        0.019985850304223122, -0.013550379618035721],
    1: [0.0, 0.2422684576748739, 0.4400505857449335, 0.5191474972894667, -0.32757913759146523,
        -0.22898324966192404, -0.2157489733769248, 0.06683312417585005, -0.10782334401927696,
        -0.07714535201411216, 0.0182175083373925],
    2: [0.0, 0.03060402345868264, 0.11490348493190047, 0.4317548070196804, 0.046565116277752214,
        -0.06353402147470293, -0.10532776094183621, -0.16034135192299814, -0.077473283458297,
        -0.021528757344505364, 0.01357989360481157],
}


@pytest.mark.parametrize("n", [0, 1, 2])
def test_bessel_matches_frozen_oracle(n):
    np.testing.assert_allclose(bessel_j(n, np.array(POINTS)), ORACLE[n], rtol=0, atol=1e-10)


def test_bessel_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(2, 0.0) == 0.0
    assert isinstance(bessel_j(0, 1.0), float)


def test_bessel_first_zero():
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-12


def test_bessel_parity():
    u = np.linspace(-50, 50, 101)
    np.testing.assert_array_equal(bessel_j(0, u), bessel_j(0, -u))
    np.testing.assert_array_equal(bessel_j(1, u), -bessel_j(1, -u))
    np.testing.assert_array_equal(bessel_j(2, u), bessel_j(2, -u))


def test_bessel_continuity_at_switch():
    lo, hi = np.nextafter(12.0, 0), np.nextafter(12.0, 13)
    for n in (0, 1, 2):
        assert abs(bessel_j(n, lo) - bessel_j(n, hi)) < 1e-10


def test_bessel_errors():
    with pytest.raises(InvalidArgumentError):
        bessel_j(3, 1.0)
    with pytest.raises(InvalidArgumentError):
        bessel_j(0, np.nan)
    with pytest.raises(InvalidArgumentError):
        bessel_j(0, np.inf)


@given(st.floats(0.0, 300.0))
def test_bessel_recurrence(u):
    # J0 + J2 = (2/u) J1
    if u > 1e-3:
        assert abs(bessel_j(0, u) + bessel_j(2, u) - 2 / u * bessel_j(1, u)) < 1e-9


def test_bessel_jn_all_agrees_with_low_orders():
    u = np.array([0.0, 0.3, 4.0, 17.0, 250.0, -3.0])
    J = bessel_jn_all(40, u)
    for n in (0, 1, 2):
        np.testing.assert_allclose(J[n], bessel_j(n, u), atol=1e-11)
    # addition theorem: J0^2 + 2 sum_{m>=1} J_m^2 = 1
    np.testing.assert_allclose(J[0, :4] ** 2 + 2 * (J[1:, :4] ** 2).sum(0), 1.0, atol=1e-12)


def test_wavenumber():
    assert wavenumber(1.0) == pytest.approx(2 * np.pi)
    with pytest.raises(InvalidArgumentError):
        wavenumber(0.0)


def test_kernel_zero_displacement():
    E = 50.0
    ks = kernel_set(E, [0.0, 0.0])
    assert ks.r == 1.0
    np.testing.assert_array_equal(ks.r0, [0.0, 0.0])
    np.testing.assert_allclose(ks.rij, 2 * np.pi ** 2 * E * np.eye(2), rtol=1e-15)
    assert ks.is_psd()


def _numeric_kernels(E, dx, h=1e-5):
    # r(x - y) = J0(k |x - y|); derivatives by central differences in x and y
    k = wavenumber(E)

    def r(x, y):
        return bessel_j(0, k * np.hypot(*(np.asarray(x) - np.asarray(y))))

    x, y = np.asarray(dx, float), np.zeros(2)
    e = np.eye(2) * h
    R = np.zeros((3, 3))
    R[0, 0] = r(x, y)
    for i in range(2):
        R[0, i + 1] = (r(x, y + e[i]) - r(x, y - e[i])) / (2 * h)
        R[i + 1, 0] = (r(x + e[i], y) - r(x - e[i], y)) / (2 * h)
        for j in range(2):
            R[i + 1, j + 1] = (r(x + e[i], y + e[j]) - r(x + e[i], y - e[j])
                               - r(x - e[i], y + e[j]) + r(x - e[i], y - e[j])) / (4 * h * h)
    return R


@pytest.mark.parametrize("dx", [(0.03, 0.01), (-0.2, 0.15), (0.0, 0.07)])
def test_kernels_match_finite_differences(dx):
    E = 30.0
    R = kernel_arrays(E, np.array(dx))
    N = _numeric_kernels(E, dx)
    scale = np.array([[1, np.sqrt(E), np.sqrt(E)], [np.sqrt(E), E, E], [np.sqrt(E), E, E]])
    np.testing.assert_allclose(R / scale, N / scale, atol=2e-5)


def test_kernel_r_entries():
    E, dx = 10.0, np.array([0.1, -0.05])
    R = kernel_arrays(E, dx)
    for i in range(3):
        for j in range(3):
            assert kernel_r(i, j, E, dx) == R[i, j]
    with pytest.raises(InvalidArgumentError):
        kernel_r(3, 0, E, dx)


@settings(max_examples=60, deadline=None)
@given(st.floats(1.5, 1e4), st.floats(-2, 2), st.floats(-2, 2))
def test_kernelset_invariants(E, a, b):
    ks = kernel_set(E, [a, b])
    c = 2 * np.pi ** 2 * E
    assert abs(ks.r) <= 1 + 1e-12
    assert np.all(np.abs(ks.rtilde) <= 1 + 1e-12)
    assert ks.rtilde[0, 0] == pytest.approx(ks.r, abs=1e-14)
    np.testing.assert_allclose(ks.rtilde[0, 1:], ks.r0 / np.sqrt(c), atol=1e-12)
    np.testing.assert_allclose(ks.rtilde[1:, 1:], ks.rij / c, atol=1e-12)
    np.testing.assert_array_equal(ks.sigma, ks.sigma.T)
    assert ks.is_psd()


def test_kernel_vectorized_shape():
    dx = np.random.default_rng(0).normal(size=(4, 5, 2))
    R = kernel_arrays(20.0, dx, normalized=True)
    assert R.shape == (3, 3, 4, 5)
    np.testing.assert_allclose(R[1, 2], R[2, 1])
    np.testing.assert_allclose(R[1, 0], -R[0, 1])


def test_kernel_bad_displacement():
    with pytest.raises(InvalidArgumentError):
        kernel_arrays(1.0, [1.0, 2.0, 3.0])
    with pytest.raises(InvalidArgumentError):
        kernel_set(1.0, [[0.0, 1.0]])


@pytest.mark.parametrize("kind,idx", [("r", (0, 0)), ("r01", (0, 1)), ("r02", (0, 2)),
                                      ("r11", (1, 1)), ("r22", (2, 2)), ("r12", (1, 2))])
def test_asymptotic_leading_form(kind, idx):
    E = 1.0
    phi = np.linspace(50, 100, 400)
    theta = 0.7
    dx = np.c_[phi * np.cos(theta), phi * np.sin(theta)]
    exact = kernel_arrays(E, dx, normalized=True)[idx]
    lead = asymptotic_leading(kind, 1.0 + 1e-12, phi, theta)
    # next term is O(phi^{-3/2})
    assert np.max(np.abs(exact - lead) * phi ** 1.5) < 0.5


def test_asymptotic_leading_errors():
    with pytest.raises(InvalidArgumentError):
        asymptotic_leading("r33", 10.0)
    with pytest.raises(InvalidArgumentError):
        asymptotic_leading("r", 1.0)
    form = asymptotic_leading("r01", 4.0)
    assert form.phase_shift == pytest.approx(np.pi / 2)
