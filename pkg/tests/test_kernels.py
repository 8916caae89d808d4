import numpy as np
import pytest

from markovpi import (
    Bandwidths,
    DimensionMismatch,
    gaussian_density,
    log_weight_matrix,
    product_weight,
    smooth_cdf_kernel,
)

# frozen against a 50-digit computation of the closed forms
GAUSS_AT_0 = 0.39894228040143268
GAUSS_AT_1 = 0.24197072451914335
K_AT_1 = 0.85761638600545304
K_AT_HALF = 0.70058932866297169
K_AT_MINUS_1_25 = 0.086851403497585287
TWO_W_AT_1 = 0.4839414490382867
INV_TWO_PI = 0.15915494309189534


def test_gaussian_density_values():
    assert gaussian_density(0.0) == pytest.approx(GAUSS_AT_0, abs=1e-15)
    assert gaussian_density(1.0) == pytest.approx(GAUSS_AT_1, abs=1e-15)


def test_gaussian_density_symmetry():
    rng = np.random.default_rng(1)
    v = rng.normal(scale=2.0, size=50)
    assert np.array_equal(gaussian_density(v), gaussian_density(-v))


def test_smooth_cdf_kernel_boundaries():
    assert smooth_cdf_kernel(0.0) == 0.5
    assert smooth_cdf_kernel(-2.0) == 0.0
    assert smooth_cdf_kernel(2.0) == 1.0
    assert smooth_cdf_kernel(-5.0) == 0.0
    assert smooth_cdf_kernel(7.0) == 1.0


def test_smooth_cdf_kernel_values():
    assert smooth_cdf_kernel(1.0) == pytest.approx(K_AT_1, abs=1e-15)
    assert smooth_cdf_kernel(0.5) == pytest.approx(K_AT_HALF, abs=1e-15)
    assert smooth_cdf_kernel(-1.25) == pytest.approx(K_AT_MINUS_1_25, abs=1e-15)


def test_smooth_cdf_kernel_array_matches_scalar():
    z = np.linspace(-3.0, 3.0, 41)
    batch = smooth_cdf_kernel(z)
    singles = np.array([smooth_cdf_kernel(float(v)) for v in z])
    assert np.array_equal(batch, singles)


def test_smooth_cdf_kernel_monotone():
    z = np.linspace(-2.5, 2.5, 2001)
    k = smooth_cdf_kernel(z)
    assert np.all(np.diff(k) >= 0.0)
    assert np.all((k >= 0.0) & (k <= 1.0))


def test_smooth_cdf_kernel_derivative_mass():
    # central-difference derivative over [-2, 2] must integrate to 1;
    # nodes stay 2e-6 inside the edges so the stencil never crosses them
    m = 10_000
    delta = 1e-6
    z = np.linspace(-2.0 + 2 * delta, 2.0 - 2 * delta, m)
    deriv = (smooth_cdf_kernel(z + delta) - smooth_cdf_kernel(z - delta)) / (2 * delta)
    mass = np.trapezoid(deriv, z)
    assert mass == pytest.approx(1.0, abs=1e-6)


def test_product_weight_values():
    assert product_weight([0.7], [0.7], 1.0) == pytest.approx(GAUSS_AT_0, abs=1e-15)
    assert product_weight([0.3, -1.2], [0.3, -1.2], 1.0) == pytest.approx(
        INV_TWO_PI, abs=1e-15
    )
    assert product_weight([1.0], [0.5], 0.5) == pytest.approx(TWO_W_AT_1, abs=1e-15)


def test_product_weight_symmetry():
    rng = np.random.default_rng(2)
    for _ in range(20):
        a = rng.normal(size=3)
        b = rng.normal(size=3)
        assert product_weight(a, b, 0.7) == product_weight(b, a, 0.7)


def test_product_weight_scaling():
    # gaps and h both scaled by c shrink the weight by c^p
    rng = np.random.default_rng(3)
    for p in (1, 2, 4):
        a = rng.normal(size=p)
        b = rng.normal(size=p)
        base = product_weight(a, b, 0.9)
        c = 3.0
        scaled = product_weight(c * a, c * b, c * 0.9)
        assert scaled == pytest.approx(base / c**p, rel=1e-12)


def test_product_weight_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        product_weight([1.0, 2.0], [1.0], 1.0)


def test_log_weight_matrix_matches_product_weight():
    rng = np.random.default_rng(4)
    for p in (1, 3):
        xi = rng.normal(size=(6, p))
        xq = rng.normal(size=(4, p))
        logw = log_weight_matrix(xi, xq, 0.8)
        assert logw.shape == (6, 4)
        for i in range(6):
            for q in range(4):
                assert np.exp(logw[i, q]) == pytest.approx(
                    product_weight(xi[i], xq[q], 0.8), rel=1e-12
                )
        single = log_weight_matrix(xi, xq[2], 0.8)
        assert single.shape == (6,)
        assert np.allclose(single, logw[:, 2], rtol=1e-15)


def test_bandwidths_validation():
    bw = Bandwidths(h=0.5, h0=0.25)
    assert (bw.h, bw.h0) == (0.5, 0.25)
    for h, h0 in ((0.0, 0.1), (0.1, -1.0), (np.nan, 0.1), (0.1, np.inf)):
        with pytest.raises(ValueError):
            Bandwidths(h=h, h0=h0)
