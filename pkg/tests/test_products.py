import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modspace.grid import GridSpec, l2_inner, relative_error, sample
from modspace.products import (
    IllConditionedWindowsError,
    ProductRequest,
    convolve_direct,
    gaussian_request,
    pair_request,
    product_admissible,
    product_norm_check,
    stft_convolve,
    stft_multiply,
    weight_condition_constant,
)
from modspace.seqspace import InadmissibleExponentsError
from modspace.weights import constant, polynomial, split
from modspace.windows import WindowSpec, make_window_pair


@pytest.fixture(scope="module")
def gaussians(grid16):
    g1 = sample({"name": "gaussian", "width": 1.0}, grid16)
    g2 = sample({"name": "gaussian", "width": 0.5, "center": 1.0}, grid16)
    g3 = sample({"name": "gaussian", "width": 0.7, "center": -1.0}, grid16)
    return g1, g2, g3


def test_convolution_theorem(grid16, gaussians):
    from modspace.grid import fourier

    g1, g2, _ = gaussians
    lhs = fourier(convolve_direct(g1, g2)).data
    assert relative_error(lhs, fourier(g1).data * fourier(g2).data) <= 1e-12


def test_pairing_normalization(grid16):
    for kind in ("multiply", "convolve"):
        for count in (2, 3):
            req = gaussian_request(kind, grid16, count)
            assert abs(req.pairing - req.target) <= 1e-12


def test_multiply_matches_pointwise_product(grid16, gaussians):
    g1, g2, _ = gaussians
    req = gaussian_request("multiply", grid16)
    out = stft_multiply([g1, g2], req)
    assert relative_error(out, g1 * g2) <= 1e-4
    assert relative_error(stft_multiply([g2, g1], req), out) <= 1e-10
    flat = sample({"name": "constant"}, grid16)
    assert relative_error(stft_multiply([flat, g2], req), g2) <= 1e-4


def test_convolve_matches_direct_convolution(grid16, gaussians):
    g1, g2, g3 = gaussians
    req = gaussian_request("convolve", grid16)
    out = stft_convolve([g1, g2], req)
    assert relative_error(out, convolve_direct(g1, g2)) <= 1e-4
    assert relative_error(stft_convolve([g2, g1], req), out) <= 1e-10
    three = stft_convolve([g1, g2, g3], gaussian_request("convolve", grid16, 3))
    assert relative_error(three, stft_convolve([out, g3], req)) <= 1e-3


def test_near_delta_factor(grid16, gaussians):
    _, g2, _ = gaussians
    bump = sample({"name": "bump", "radius": 0.25}, grid16)
    bump = bump * (np.sqrt(2 * np.pi) / (bump.data.sum().real * grid16.step))
    out = stft_convolve([bump, g2], gaussian_request("convolve", grid16))
    assert relative_error(out, convolve_direct(bump, g2)) <= 1e-3
    assert relative_error(out, g2) < 0.1


@pytest.mark.parametrize("kind", ["multiply", "convolve"])
def test_window_independence(grid16, pair16, gaussians, kind):
    g1, g2, _ = gaussians
    apply = stft_multiply if kind == "multiply" else stft_convolve
    a = apply([g1, g2], gaussian_request(kind, grid16))
    b = apply([g1, g2], pair_request(kind, pair16))
    c = apply([g1, g2], gaussian_request(kind, grid16, widths=[0.6, 0.8, 0.9]))
    assert relative_error(b, a) <= 1e-3 and relative_error(c, a) <= 1e-3


def test_request_validation(grid16):
    g = sample({"name": "gaussian", "width": 1.0}, grid16)
    with pytest.raises(ValueError):
        ProductRequest("add", (g, g), g)
    with pytest.raises(ValueError):
        ProductRequest("multiply", (g,), g)
    with pytest.raises(ValueError):
        gaussian_request("multiply", grid16, 2, widths=[1.0])
    far = sample({"name": "bump", "radius": 0.2, "center": 6.0}, grid16)
    near = sample({"name": "bump", "radius": 0.2}, grid16)
    with pytest.raises(IllConditionedWindowsError):
        ProductRequest("multiply", (near, near), far)
    req = gaussian_request("multiply", grid16)
    with pytest.raises(ValueError):
        stft_convolve([g, g], req)
    with pytest.raises(ValueError):
        stft_multiply([g, g, g], req)


def test_admissibility():
    assert product_admissible("multiply", "M", [2, 2], [1, 1], 1, 1)
    assert not product_admissible("multiply", "M", [1, 1], [2, 2], 0.5, 1)
    assert product_admissible("convolve", "M", [1, 1], [2, 2], 1, 1)
    assert product_admissible("convolve", "W", ["1/2", "1/2"], [2, 2], "1/2", 1)
    with pytest.raises(ValueError):
        product_admissible("divide", "M", [1], [1], 1, 1)


def test_weight_constants():
    w = split(polynomial(1), polynomial(1))
    assert weight_condition_constant("multiply", split(constant(), constant()), [w, w]) <= 1.0
    c = weight_condition_constant("convolve", w, [w, w])
    assert 1.0 <= c <= 2.0


def _norm_ratios(kind, p, q, p0, q0, flavor="M"):
    ratios = []
    for n in (8, 16, 32):
        spec = GridSpec(1, 16, n)
        pair = make_window_pair(WindowSpec(2.0, spec))
        f1 = sample({"name": "gaussian", "width": 1.0}, spec)
        f2 = sample({"name": "gaussian", "width": 0.5, "center": 1.0}, spec)
        ratios.append(product_norm_check([f1, f2], p, q, p0, q0, pair, kind, flavor).ratio)
    return ratios


def test_multiply_norm_estimate_is_stable():
    r = _norm_ratios("multiply", [2, 2], [1, 1], 1, 1)
    assert all(np.isfinite(r)) and max(r) / min(r) < 1.1


def test_convolve_norm_estimate_is_stable():
    r = _norm_ratios("convolve", [1, 1], [2, 2], 1, 1)
    assert all(np.isfinite(r)) and max(r) / min(r) < 1.1


def test_inadmissible_norm_check_is_refused(grid16, pair16, gaussians):
    with pytest.raises(InadmissibleExponentsError):
        product_norm_check(list(gaussians[:2]), [1, 1], [2, 2], 0.5, 1, pair16)


def test_norm_ratio_is_scale_invariant(grid16, pair16, gaussians):
    g1, g2, _ = gaussians
    base = product_norm_check([g1, g2], [2, 2], [1, 1], 1, 1, pair16).ratio
    scaled = product_norm_check([g1 * (3 - 4j), g2], [2, 2], [1, 1], 1, 1, pair16).ratio
    assert scaled == pytest.approx(base, rel=1e-10)


@settings(max_examples=15)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.3, 0.6))
def test_multiply_oracle_property(c1, c2, width):
    spec = GridSpec(1, 16, 16)
    f = sample({"name": "gaussian", "width": width, "center": c1}, spec)
    g = sample({"name": "gaussian", "width": 0.5, "center": c2}, spec)
    out = stft_multiply([f, g], gaussian_request("multiply", spec))
    assert relative_error(out, f * g) <= 1e-4
