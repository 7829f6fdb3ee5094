import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from modspace.gabor import DenseSTFT, analyze, project, stft_dense
from modspace.grid import GridSpec, sample
from modspace.modnorm import (
    ExponentOrderError,
    ModNormRequest,
    UncertifiedRequestError,
    dense_quasi_norm,
    embedding_check,
    local_norms,
    mod_norm,
    wiener_norm,
)
from modspace.seqspace import EXPONENT_POOL, INF
from modspace.weights import constant, polynomial, split, subexponential
from modspace.windows import WindowPair


def noise(spec, seed, bandwidth=4.0):
    return sample({"name": "noise", "seed": seed, "bandwidth": bandwidth}, spec)


def test_zero_signal(grid16, pair16):
    for mode in ("lattice", "dense"):
        assert mod_norm(sample("zero", grid16), ModNormRequest(1, 2, pair16, mode=mode)) == 0.0


def test_moyal_in_dense_mode(grid16, pair16):
    f = noise(grid16, 1)
    assert mod_norm(f, ModNormRequest(2, 2, pair16, mode="dense")) == pytest.approx(pair16.phi.norm() * f.norm(), rel=1e-6)


def test_request_validation(grid16, pair16):
    with pytest.raises(ValueError):
        ModNormRequest(2, 2, pair16, flavor="X")
    with pytest.raises(ValueError):
        ModNormRequest(2, 2, pair16, mode="sparse")
    bad = WindowPair(pair16.phi * 1.5, pair16.psi, pair16.spec)
    with pytest.raises(UncertifiedRequestError):
        mod_norm(noise(grid16, 0), ModNormRequest(2, 2, bad))
    with pytest.raises(UncertifiedRequestError):
        mod_norm(noise(grid16, 0), ModNormRequest(2, 2, pair16, weight=polynomial(1)))


def test_orders_collapse_for_equal_exponents(grid16, pair16):
    f = noise(grid16, 2)
    w = split(polynomial(1), polynomial(-1))
    for p in (0.5, 1, 2, INF):
        m = mod_norm(f, ModNormRequest(p, p, pair16, "M", w))
        assert mod_norm(f, ModNormRequest(p, p, pair16, "W", w)) == pytest.approx(m, rel=1e-12)


def test_modulation_invariance_for_position_weights(grid16, pair16):
    f = noise(grid16, 3)
    modulated = f * np.exp(3j * np.pi * grid16.coords())
    w = split(polynomial(2), constant())
    for p, q in ((1, 2), (0.5, INF), (2, 0.5)):
        req = ModNormRequest(p, q, pair16, "M", w)
        assert mod_norm(modulated, req) == pytest.approx(mod_norm(f, req), rel=1e-10)


def test_lattice_and_dense_norms_are_equivalent(grid16, pair16):
    exps = (0.5, 1, 2, INF)
    for p in exps:
        for q in exps:
            ratios = []
            for width in (1 / 16, 1 / 8, 1 / 4, 1 / 2, 1):
                f = sample({"name": "gaussian", "width": width}, grid16)
                lat = mod_norm(f, ModNormRequest(p, q, pair16))
                den = mod_norm(f, ModNormRequest(p, q, pair16, mode="dense"))
                ratios.append(lat / den)
            assert max(ratios) / min(ratios) <= 10


def test_embedding_check(grid16, pair16):
    g = sample({"name": "gaussian", "width": 0.5}, grid16)
    n1, n2, ok = embedding_check(g, (2, 2), (2, 2), pair16)
    assert n1 == n2 and ok
    assert embedding_check(g, (0.5, 0.5), (2, 2), pair16)[2]
    assert embedding_check(noise(grid16, 4), (1, INF), (2, INF), pair16)[2]
    with pytest.raises(ExponentOrderError):
        embedding_check(g, (2, 2), (1, 2), pair16)


def _cube_mass(spec):
    values = np.zeros(spec.shape * 2)
    n = spec.samples_per_unit
    c = spec.size // 2
    # positions fill [0, 1); the single frequency sample covers [0, freq_step) inside [0, 1)
    values[c : c + n, c] = 1.0
    return DenseSTFT(spec, values)


def test_wiener_norm_of_one_cube():
    spec = GridSpec(1, 8, 16)
    F = _cube_mass(spec)
    for p, q in ((1, 1), (0.5, 2), (INF, 0.5)):
        assert wiener_norm(F, INF, p, q) == 1.0
        for r in (0.5, 1, 2):
            assert wiener_norm(F, r, p, q) == pytest.approx(spec.freq_step ** (1 / r), rel=1e-12)
    # the weight's largest value on the occupied samples of the cube
    w = split(polynomial(2), constant())
    assert wiener_norm(F, INF, 1, 1, w) == pytest.approx(1 + (1 - spec.step) ** 2, rel=1e-12)


def _random_phase_space(spec, seed):
    rng = np.random.default_rng(seed)
    return DenseSTFT(spec, np.exp(rng.normal(0, 1.5, spec.shape * 2)))


def test_wiener_norm_monotone_in_local_exponent():
    spec = GridSpec(1, 8, 16)
    F = _random_phase_space(spec, 0)
    values = [wiener_norm(F, r, 1, 2) for r in (0.5, 1, 2, 4, INF)]
    assert all(a <= b * (1 + 1e-12) for a, b in zip(values, values[1:]))


def test_wiener_sandwich():
    spec = GridSpec(1, 8, 16)
    for seed in range(3):
        F = _random_phase_space(spec, seed)
        for p, q in ((1, 1), (2, 0.5), (0.5, 2), (INF, 1)):
            r = min(1.0, p, q)
            low = wiener_norm(F, r, p, q)
            mid = dense_quasi_norm(F, p, q)
            high = wiener_norm(F, INF, p, q)
            assert low <= mid * (1 + 1e-12) and mid <= high * (1 + 1e-12)


def test_projection_is_bounded_in_wiener_norm(coarse, coarse_pair):
    rng = np.random.default_rng(5)
    shape = coarse.shape * 2
    ratios = []
    for _ in range(5):
        F = DenseSTFT(coarse, rng.normal(size=shape) + 1j * rng.normal(size=shape))
        P = project(F, coarse_pair.phi)
        ratios.append(wiener_norm(P, INF, 1, 1) / wiener_norm(F, INF, 1, 1))
    assert max(ratios) < 10


def test_local_norms_reject_nothing_for_zero():
    spec = GridSpec(1, 8, 16)
    zero = DenseSTFT(spec, np.zeros(spec.shape * 2))
    assert not np.any(local_norms(zero, 1).values)
    with pytest.raises(ValueError):
        wiener_norm(DenseSTFT(GridSpec(1, 8, 2), np.zeros((16, 16))), 1, 1, 1)


@settings(max_examples=20)
@given(
    st.integers(0, 2**32 - 1),
    st.sampled_from(EXPONENT_POOL),
    st.sampled_from(EXPONENT_POOL),
    st.sampled_from(["M", "W"]),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False),
)
def test_homogeneity_property(seed, p, q, flavor, lam):
    spec = GridSpec(1, 8, 16)
    from modspace.windows import WindowSpec, make_window_pair

    pair = make_window_pair(WindowSpec(2.0, spec))
    f = noise(spec, seed)
    req = ModNormRequest(p, q, pair, flavor, split(subexponential(0.5, 2), polynomial(1)))
    assert mod_norm(f * lam, req) == pytest.approx(abs(lam) * mod_norm(f, req), rel=1e-12)
