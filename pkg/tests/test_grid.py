import numpy as np
import pytest
from hypothesis import given, strategies as st

from modspace.grid import (
    AliasingError,
    GridMismatchError,
    GridSpec,
    SampledSignal,
    UnknownDescriptorError,
    fourier,
    l2_inner,
    relative_error,
    sample,
    spectral_derivative,
)

CATALOG = [
    {"name": "gaussian", "width": 0.8, "center": 1.5},
    {"name": "bump", "radius": 1.5},
    {"name": "plane_wave_bump", "modulation": np.pi, "radius": 1.0},
    {"name": "noise", "seed": 3, "bandwidth": 6.0},
    {"name": "boxcar", "start": -1.0, "stop": 2.0},
    {"name": "constant", "value": 2 - 1j},
]


def test_coordinates_place_integers_on_grid(grid16):
    x = grid16.coords()
    assert x[0] == -8 and x[grid16.size // 2] == 0
    assert np.allclose(x[:: grid16.samples_per_unit], np.arange(-8, 8))


def test_lattice_frequencies_are_grid_points(grid16):
    xi = grid16.freqs()
    for k in range(-grid16.samples_per_unit, grid16.samples_per_unit):
        assert np.min(np.abs(xi - np.pi * k)) < 1e-12


def test_gaussian_peak_and_zero(grid16):
    g = sample({"name": "gaussian", "width": 1.0}, grid16)
    assert g.data[grid16.index_of(0.0)] == pytest.approx(1.0)
    assert not np.any(sample("zero", grid16).data)


def test_sampling_is_deterministic(grid16):
    a = sample({"name": "noise", "seed": 7}, grid16)
    b = sample({"name": "noise", "seed": 7}, grid16)
    assert np.array_equal(a.data, b.data)


def test_unknown_descriptor_and_aliasing(grid16):
    with pytest.raises(UnknownDescriptorError):
        sample({"name": "chirp"}, grid16)
    with pytest.raises(AliasingError):
        sample({"name": "gaussian", "width": 3.0}, grid16)


def test_gaussian_is_self_dual(grid16):
    g = sample({"name": "gaussian", "width": 1.0}, grid16)
    xi = grid16.freqs()
    assert relative_error(fourier(g).data, np.exp(-(xi**2) / 2)) <= 1e-10


@pytest.mark.parametrize("desc", CATALOG, ids=lambda d: d["name"])
def test_fourier_inverse_and_parseval(grid16, desc):
    f = sample(desc, grid16)
    hat = fourier(f)
    assert relative_error(fourier(hat, "inverse"), f) <= 1e-12
    assert hat.norm() == pytest.approx(f.norm(), rel=1e-12)


def test_translation_by_one_cell_is_a_phase(grid16):
    f = sample({"name": "noise", "seed": 2}, grid16)
    moved = f.with_data(np.roll(f.data, 1))
    phase = np.exp(-1j * grid16.freqs() / grid16.samples_per_unit)
    assert relative_error(fourier(moved).data, fourier(f).data * phase) <= 1e-12


def test_fourier_direction_checks(grid16):
    f = sample("zero", grid16)
    with pytest.raises(ValueError):
        fourier(f, "inverse")
    with pytest.raises(ValueError):
        fourier(fourier(f))


def test_inner_product_properties(grid16):
    f = sample({"name": "noise", "seed": 1}, grid16)
    g = sample({"name": "noise", "seed": 2}, grid16)
    assert l2_inner(f, f).real == pytest.approx(f.norm() ** 2, rel=1e-12)
    assert l2_inner(f, f).imag == 0
    assert l2_inner(f, g) == np.conj(l2_inner(g, f))
    x = grid16.coords()
    e1 = SampledSignal(grid16, np.exp(1j * np.pi * x))
    e2 = SampledSignal(grid16, np.exp(2j * np.pi * x))
    assert abs(l2_inner(e1, e2)) <= 1e-12


def test_grid_mismatch(grid16, coarse):
    with pytest.raises(GridMismatchError):
        l2_inner(sample("zero", grid16), sample("zero", coarse))


def test_spectral_derivative_of_plane_wave(grid16):
    x = grid16.coords()
    f = SampledSignal(grid16, np.exp(2j * np.pi * x))
    assert relative_error(spectral_derivative(f, 1), f * (2j * np.pi)) <= 1e-12


def test_two_dimensional_transform_is_isometric():
    spec = GridSpec(2, 8, 8)
    f = sample({"name": "gaussian", "width": [0.4, 0.45], "center": [0.25, 0.0]}, spec)
    hat = fourier(f)
    assert hat.norm() == pytest.approx(f.norm(), rel=1e-12)
    assert relative_error(fourier(hat, "inverse"), f) <= 1e-12


@given(
    st.integers(0, 2**31 - 1),
    st.floats(0.5, 10.0),
    st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
)
def test_fourier_isometry_property(seed, bandwidth, scale):
    spec = GridSpec(1, 8, 16)
    f = sample({"name": "noise", "seed": seed, "bandwidth": bandwidth}, spec) * scale
    assert fourier(f).norm() == pytest.approx(f.norm(), rel=1e-12, abs=1e-300)
