import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hzspf.regionstats import (
    convolve,
    default_radius,
    dirac,
    factored_gap,
    heaviside,
    local_energies,
    local_fit,
    make_kernel,
    region_stats,
    window_energies,
)

# exp(-d^2/2)/Z for d in -3..3, evaluated with mpmath at 40 digits
TAPS_SIGMA1_R3 = [
    0.0044330481752437457079,
    0.054005582622414485255,
    0.24203622937611432329,
    0.3990502796524548915,
    0.24203622937611432329,
    0.054005582622414485255,
    0.0044330481752437457079,
]


def random_instance(rng, h=16, w=16):
    return rng.random((h, w)), rng.uniform(-2.0, 2.0, (h, w))


# -- heaviside / dirac -------------------------------------------------------

def test_heaviside_at_zero_is_half():
    for eps in (0.1, 1.0, 7.0):
        assert heaviside(0.0, eps) == 0.5


def test_heaviside_saturates():
    assert heaviside(1e9, 1.0) > 0.999999
    assert heaviside(-1e9, 1.0) < 1e-6


@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e3))
def test_heaviside_odd_symmetry(x, eps):
    assert heaviside(-x, eps) + heaviside(x, eps) == pytest.approx(1.0, abs=1e-15)
    assert 0.0 <= heaviside(x, eps) <= 1.0


def test_dirac_at_zero():
    for eps in (0.5, 1.0, 2.0):
        assert dirac(0.0, eps) == pytest.approx(1.0 / (math.pi * eps), rel=1e-15)


@given(st.floats(-5, 5), st.sampled_from([0.5, 1.0, 2.0]))
def test_dirac_is_derivative_of_heaviside(phi, eps):
    h = 1e-5
    fd = (heaviside(phi + h, eps) - heaviside(phi - h, eps)) / (2 * h)
    assert abs(fd - dirac(phi, eps)) / dirac(phi, eps) < 1e-6


@pytest.mark.parametrize("eps", [0.0, -1.0])
def test_nonpositive_epsilon_rejected(eps):
    with pytest.raises(ValueError):
        heaviside(0.3, eps)
    with pytest.raises(ValueError):
        dirac(0.3, eps)


# -- region_stats ------------------------------------------------------------

def test_constant_image_stats():
    phi = np.ones((5, 5))
    phi[0] = -1
    s = region_stats(np.full((5, 5), 0.7), phi)
    assert s.c1 == pytest.approx(0.7) and s.c2 == pytest.approx(0.7) and s.m == pytest.approx(0.7)
    assert not s.degenerate


def test_even_median_and_replicated_layout():
    # the 2x2 image [[0.2, 0.4], [0.6, 0.8]] replicated up to 4x4
    base = np.array([[0.2, 0.4], [0.6, 0.8]])
    image = np.kron(base, np.ones((2, 2)))
    phi = np.where((image == 0.2) | (image == 0.8), 1.0, -1.0)
    s = region_stats(image, phi)
    assert s.c1 == pytest.approx(0.5, abs=1e-15)
    assert s.m == pytest.approx(0.5, abs=1e-15)
    assert s.c2 == pytest.approx(0.5, abs=1e-15)


def test_all_positive_phi_is_degenerate():
    rng = np.random.default_rng(3)
    image = rng.random((6, 6))
    s = region_stats(image, np.ones((6, 6)))
    assert s.outside_empty and not s.inside_empty and s.degenerate
    assert s.c2 == pytest.approx(image.mean(), abs=1e-15)


def test_zero_phi_counts_as_inside():
    image = np.arange(9, dtype=float).reshape(3, 3) / 8
    phi = -np.ones((3, 3))
    phi[1, 1] = 0.0
    s = region_stats(image, phi)
    assert s.c1 == image[1, 1] and s.m == image[1, 1]


@pytest.mark.parametrize("seed", range(10))
def test_region_stats_matches_loop_and_sort(seed):
    rng = np.random.default_rng(seed)
    image, phi = random_instance(rng)
    c1, c2, m = oracles.region_stats(image.tolist(), phi.tolist())
    s = region_stats(image, phi)
    assert s.c1 == pytest.approx(c1, abs=1e-12)
    assert s.c2 == pytest.approx(c2, abs=1e-12)
    assert s.m == m
    lo, hi = image.min(), image.max()
    assert lo <= min(s.c1, s.c2, s.m) and max(s.c1, s.c2, s.m) <= hi


def test_region_stats_shape_mismatch():
    with pytest.raises(ValueError):
        region_stats(np.zeros((3, 3)), np.zeros((3, 4)))


# -- kernels and convolution ---------------------------------------------------

def test_kernel_taps_frozen():
    k = make_kernel(1.0, 3)
    assert k.size == 7
    np.testing.assert_allclose(k.taps, TAPS_SIGMA1_R3, rtol=0, atol=1e-15)


def test_flat_kernel_limit():
    np.testing.assert_allclose(make_kernel(1e6, 1).taps, [1 / 3] * 3, atol=1e-6)


@given(st.floats(0.05, 50.0), st.integers(1, 40))
def test_kernel_invariants(sigma, radius):
    taps = make_kernel(sigma, radius).taps
    assert abs(taps.sum() - 1.0) <= 1e-12
    assert np.array_equal(taps, taps[::-1])
    assert np.all(taps >= 0) and taps[radius] == taps.max()


def test_default_radius():
    assert default_radius(3.0) == 9
    assert default_radius(0.1) == 1
    assert make_kernel(1.0).radius == 3


@pytest.mark.parametrize("sigma, radius", [(0.0, 1), (-1.0, 1), (1.0, 0), (1.0, 1.5)])
def test_bad_kernel(sigma, radius):
    with pytest.raises(ValueError):
        make_kernel(sigma, radius)


def test_convolve_constant_preserved():
    out = convolve(np.full((7, 9), 0.37), make_kernel(2.0, 4))
    np.testing.assert_allclose(out, 0.37, atol=1e-15)


def test_convolve_impulse_is_outer_product():
    f = np.zeros((9, 9))
    f[4, 4] = 1.0
    k = make_kernel(1.0, 2)
    out = convolve(f, k)
    expected = np.zeros((9, 9))
    expected[2:7, 2:7] = np.outer(k.taps, k.taps)
    np.testing.assert_allclose(out, expected, atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_convolve_matches_direct_sum(seed):
    rng = np.random.default_rng(100 + seed)
    f = rng.random((16, 16))
    sigma, radius = [(1.0, 3), (3.0, 9), (0.7, 2)][seed % 3]
    out = convolve(f, make_kernel(sigma, radius))
    ref = np.array(oracles.direct_convolve(f.tolist(), sigma, radius))
    np.testing.assert_allclose(out, ref, rtol=0, atol=1e-10)


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_convolve_linear(a, b, seed):
    rng = np.random.default_rng(seed)
    f, g = rng.random((8, 10)), rng.random((8, 10))
    k = make_kernel(1.5)
    np.testing.assert_allclose(convolve(a * f + b * g, k), a * convolve(f, k) + b * convolve(g, k), atol=1e-12)


# -- local fitting -------------------------------------------------------------

def test_local_fit_constant_image():
    rng = np.random.default_rng(1)
    phi = rng.uniform(-1, 1, (10, 10))
    k = make_kernel(2.0)
    fields = local_energies(np.full((10, 10), 0.4), phi, local_fit(np.full((10, 10), 0.4), phi, k, 1.0), k, 1.0)
    np.testing.assert_allclose(fields.f1, 0.4, atol=1e-14)
    np.testing.assert_allclose(fields.f2, 0.4, atol=1e-14)
    np.testing.assert_allclose(fields.e1, 0.0, atol=1e-14)
    np.testing.assert_allclose(fields.e2, 0.0, atol=1e-14)


def test_local_fit_saturated_phi_is_local_mean():
    rng = np.random.default_rng(2)
    image = rng.random((12, 12))
    k = make_kernel(1.5)
    fields = local_fit(image, np.full((12, 12), 1e12), k, 1.0)
    np.testing.assert_allclose(fields.f1, convolve(image, k), atol=1e-10)


@pytest.mark.parametrize("seed", range(10))
def test_local_fields_match_double_loop(seed):
    rng = np.random.default_rng(200 + seed)
    image, phi = random_instance(rng)
    sigma, radius, eps = 2.0, 5, 1.0
    k = make_kernel(sigma, radius)
    fields = local_energies(image, phi, local_fit(image, phi, k, eps), k, eps)
    ref = np.array([
        [oracles.local_energies_at(image.tolist(), phi.tolist(), sigma, radius, eps, i, j) for j in range(16)]
        for i in range(16)
    ])
    for idx, name in enumerate(("f1", "f2", "e1", "e2")):
        np.testing.assert_allclose(getattr(fields, name), ref[..., idx], rtol=0, atol=1e-9, err_msg=name)
    assert np.all(fields.e1 >= 0) and np.all(fields.e2 >= 0)
    lo, hi = image.min(), image.max()
    for f in (fields.f1, fields.f2):
        assert np.all(f >= lo - 1e-12) and np.all(f <= hi + 1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_window_energies_and_factored_gap(seed):
    rng = np.random.default_rng(300 + seed)
    image, phi = random_instance(rng, 12, 12)
    sigma, radius, eps = 1.5, 4, 1.0
    k = make_kernel(sigma, radius)
    fields = local_fit(image, phi, k, eps)
    e1, e2 = window_energies(image, fields, k)
    ref = np.array([
        [oracles.window_energies_at(image.tolist(), phi.tolist(), sigma, radius, eps, i, j) for j in range(12)]
        for i in range(12)
    ])
    np.testing.assert_allclose(e1, ref[..., 2], atol=1e-9)
    np.testing.assert_allclose(e2, ref[..., 3], atol=1e-9)
    np.testing.assert_allclose(ref[..., 3] - ref[..., 2], factored_gap(image, fields, k), atol=1e-9)


def test_weighted_gap_is_not_the_factored_form():
    # the factorization needs both energies to span the whole window
    rng = np.random.default_rng(0)
    image, phi = random_instance(rng, 12, 12)
    k = make_kernel(1.5, 4)
    fields = local_energies(image, phi, local_fit(image, phi, k, 1.0), k, 1.0)
    gap = fields.e2 - fields.e1
    assert np.max(np.abs(gap - factored_gap(image, fields, k))) > 1e-3
