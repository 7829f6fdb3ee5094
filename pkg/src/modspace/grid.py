"""Periodic sampled functions on R^d and the unitary Fourier transform.

A :class:`GridSpec` describes the torus ``[-L/2, L/2)^d`` sampled at ``n``
points per unit length.  Sample ``m`` along an axis sits at
``x_m = -L/2 + m/n`` so the origin and every integer are grid points.
Frequencies are ``xi_k = 2*pi*k/L`` for ``k`` in ``[-L*n/2, L*n/2)``, stored
in natural (ascending) order, which makes every ``xi`` in ``pi*Z`` below
Nyquist an exact grid frequency.

The continuous transform ``(2*pi)^(-d/2) int f(x) exp(-i<x, xi>) dx`` is
approximated by a Riemann sum with cell volume ``(1/n)^d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np
import scipy.fft as sfft

Domain = Literal["time", "freq"]

_TAIL = 1e-15
_ALIAS_LIMIT = 1e-12


class GridMismatchError(ValueError):
    """Raised when two objects live on different grids."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on ``[-L/2, L/2)^d``.

    Parameters
    ----------
    dim : int
        Space dimension ``d``.
    period_units : int
        Period ``L`` per axis; must be even so that ``pi`` is a grid frequency.
    samples_per_unit : int
        Samples per unit length ``n``; a power of two.
    """

    dim: int
    period_units: int
    samples_per_unit: int

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise ValueError("dim must be positive")
        if self.period_units < 2 or self.period_units % 2:
            raise ValueError("period_units must be a positive even integer")
        n = self.samples_per_unit
        if n < 1 or n & (n - 1):
            raise ValueError("samples_per_unit must be a power of two")

    @property
    def size(self) -> int:
        """Samples per axis, ``L*n``."""
        return self.period_units * self.samples_per_unit

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.size,) * self.dim

    @property
    def step(self) -> float:
        return 1.0 / self.samples_per_unit

    @property
    def cell_volume(self) -> float:
        return self.step**self.dim

    @property
    def freq_step(self) -> float:
        return 2.0 * np.pi / self.period_units

    @property
    def freq_cell_volume(self) -> float:
        return self.freq_step**self.dim

    @property
    def nyquist(self) -> float:
        return np.pi * self.samples_per_unit

    def coords(self) -> np.ndarray:
        """1-D sample positions along one axis."""
        return -self.period_units / 2 + np.arange(self.size) / self.samples_per_unit

    def freqs(self) -> np.ndarray:
        """1-D frequencies along one axis, ascending."""
        return self.freq_step * (np.arange(self.size) - self.size // 2)

    def mesh(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays, one per axis."""
        return _mesh(self.coords(), self.dim)

    def freq_mesh(self) -> list[np.ndarray]:
        return _mesh(self.freqs(), self.dim)

    def index_of(self, x: float) -> int:
        """Index of the grid point at ``x`` (taken modulo the period)."""
        m = round((x + self.period_units / 2) * self.samples_per_unit)
        return int(m) % self.size

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.dim, self.period_units, self.samples_per_unit * factor)


def _mesh(axis: np.ndarray, dim: int) -> list[np.ndarray]:
    out = []
    for k in range(dim):
        shape = [1] * dim
        shape[k] = axis.size
        out.append(axis.reshape(shape))
    return out


@dataclass(frozen=True)
class SampledSignal:
    """Complex samples of an ``L``-periodic function (or of its transform).

    ``data`` has shape ``spec.shape``; the array is made read-only on
    construction.  ``domain='freq'`` marks values on the frequency grid.
    """

    spec: GridSpec
    data: np.ndarray = field(repr=False)
    domain: Domain = "time"

    def __post_init__(self) -> None:
        arr = np.array(self.data, dtype=np.complex128, copy=True)
        if arr.shape != self.spec.shape:
            raise ValueError(f"data shape {arr.shape} != grid shape {self.spec.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def measure(self) -> float:
        if self.domain == "time":
            return self.spec.cell_volume
        return self.spec.freq_cell_volume

    def with_data(self, data: np.ndarray) -> "SampledSignal":
        return SampledSignal(self.spec, data, self.domain)

    def norm(self) -> float:
        """Riemann-sum L^2 norm."""
        return float(np.sqrt(np.sum(np.abs(self.data) ** 2) * self.measure))

    def sup(self) -> float:
        return float(np.max(np.abs(self.data))) if self.data.size else 0.0

    def __add__(self, other: "SampledSignal") -> "SampledSignal":
        check_same_grid(self, other)
        return self.with_data(self.data + other.data)

    def __sub__(self, other: "SampledSignal") -> "SampledSignal":
        check_same_grid(self, other)
        return self.with_data(self.data - other.data)

    def __mul__(self, other) -> "SampledSignal":
        if isinstance(other, SampledSignal):
            check_same_grid(self, other)
            return self.with_data(self.data * other.data)
        return self.with_data(self.data * other)

    __rmul__ = __mul__

    def conj(self) -> "SampledSignal":
        return self.with_data(np.conj(self.data))

    def shift(self, offset: float | tuple[float, ...]) -> "SampledSignal":
        """Circular translation ``x -> f(x - offset)``; offset must be a grid step multiple."""
        offs = np.broadcast_to(np.asarray(offset, dtype=float), (self.spec.dim,))
        steps = []
        for o in offs:
            s = o * self.spec.samples_per_unit
            if abs(s - round(s)) > 1e-9:
                raise ValueError("shift must be a multiple of the grid step")
            steps.append(int(round(s)))
        return self.with_data(np.roll(self.data, steps, axis=tuple(range(self.spec.dim))))


def check_same_grid(*signals: SampledSignal) -> None:
    first = signals[0]
    for s in signals[1:]:
        if s.spec != first.spec or s.domain != first.domain:
            raise GridMismatchError(f"{s.spec}/{s.domain} vs {first.spec}/{first.domain}")


def relative_error(a: SampledSignal | np.ndarray, b: SampledSignal | np.ndarray) -> float:
    """``||a - b||_2 / ||b||_2`` on raw samples."""
    x = a.data if isinstance(a, SampledSignal) else np.asarray(a)
    y = b.data if isinstance(b, SampledSignal) else np.asarray(b)
    den = np.linalg.norm(y)
    num = np.linalg.norm(x - y)
    return float(num / den) if den > 0 else float(num)


# ---------------------------------------------------------------------------
# Fourier transform


def _axes(spec: GridSpec) -> tuple[int, ...]:
    return tuple(range(spec.dim))


def fft_centered(data: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """DFT with sample index and frequency index both centred at ``size//2``."""
    return sfft.fftshift(sfft.fftn(sfft.ifftshift(data, axes=axes), axes=axes), axes=axes)


def ifft_centered(data: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    return sfft.fftshift(sfft.ifftn(sfft.ifftshift(data, axes=axes), axes=axes), axes=axes)


def fourier(f: SampledSignal, direction: Literal["forward", "inverse"] = "forward") -> SampledSignal:
    """Unitary Fourier transform of a sampled signal.

    The forward map approximates ``(2*pi)^(-d/2) int f(x) e^{-i<x,xi>} dx``
    and returns samples on the frequency grid; the inverse undoes it exactly
    (up to rounding).
    """
    spec = f.spec
    d = spec.dim
    axes = _axes(spec)
    if direction == "forward":
        if f.domain != "time":
            raise ValueError("forward transform expects a time-domain signal")
        scale = (2 * np.pi) ** (-d / 2) * spec.cell_volume
        return SampledSignal(spec, scale * fft_centered(f.data, axes), "freq")
    if direction == "inverse":
        if f.domain != "freq":
            raise ValueError("inverse transform expects a frequency-domain signal")
        scale = (2 * np.pi) ** (-d / 2) * spec.freq_cell_volume * spec.size**d
        return SampledSignal(spec, scale * ifft_centered(f.data, axes), "time")
    raise ValueError(f"unknown direction {direction!r}")


def l2_inner(f: SampledSignal, g: SampledSignal) -> complex:
    """Riemann sum of ``int f * conj(g)``."""
    check_same_grid(f, g)
    return complex(np.vdot(g.data, f.data) * f.measure)


def spectral_derivative(f: SampledSignal, order: int | tuple[int, ...]) -> SampledSignal:
    """``d^alpha f`` by multiplying the transform with ``(i xi)^alpha``.

    The Nyquist mode is zeroed for odd orders so real input stays real.
    """
    spec = f.spec
    alpha = (order,) + (0,) * (spec.dim - 1) if isinstance(order, int) else tuple(order)
    if len(alpha) != spec.dim:
        raise ValueError("multi-index length must equal grid dimension")
    axes = _axes(spec)
    hat = fft_centered(f.data, axes)
    xi = spec.freqs()
    for k, a in enumerate(alpha):
        if a == 0:
            continue
        factor = (1j * xi) ** a
        if a % 2:
            factor[0] = 0.0
        shape = [1] * spec.dim
        shape[k] = xi.size
        hat = hat * factor.reshape(shape)
    return f.with_data(ifft_centered(hat, axes))


# ---------------------------------------------------------------------------
# Closed-form sampling catalog


class UnknownDescriptorError(ValueError):
    pass


class AliasingError(ValueError):
    """Periodization would change the sampled function by more than 1e-12."""


def _vec(value, dim: int) -> np.ndarray:
    return np.broadcast_to(np.asarray(value, dtype=float), (dim,)).copy()


def _periodized_gaussian(spec: GridSpec, center: np.ndarray, width: np.ndarray) -> np.ndarray:
    L = spec.period_units
    out = np.ones(spec.shape)
    x = spec.coords()
    for k in range(spec.dim):
        images = np.zeros_like(x)
        primary = np.zeros_like(x)
        m = 0
        while True:
            shifts = [0] if m == 0 else [m * L, -m * L]
            contrib = np.zeros_like(x)
            for s in shifts:
                # nearest image of the centre first: wrap to [-L/2, L/2)
                c = (center[k] + L / 2) % L - L / 2
                contrib += np.exp(-((x - c - s) ** 2) / (2 * width[k] ** 2))
            if m == 0:
                primary = contrib
            else:
                images += contrib
                if contrib.max() < _TAIL:
                    break
            m += 1
            if m > 1000:
                break
        if images.max() > _ALIAS_LIMIT:
            raise AliasingError(f"gaussian width {width[k]} aliases on period {L}")
        shape = [1] * spec.dim
        shape[k] = x.size
        out = out * (primary + images).reshape(shape)
    return out


def gevrey_profile(t: np.ndarray, sigma: float) -> np.ndarray:
    """``exp(-t^(-1/(sigma-1)))`` for ``t > 0`` and 0 otherwise."""
    if sigma <= 1:
        raise ValueError("Gevrey order must exceed 1")
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-np.power(t[pos], -1.0 / (sigma - 1.0)))
    return out


def _wrapped_offsets(spec: GridSpec, center: np.ndarray) -> list[np.ndarray]:
    L = spec.period_units
    return [((x - c + L / 2) % L) - L / 2 for x, c in zip(spec.mesh(), center)]


def _bump(spec: GridSpec, center: np.ndarray, radius: float, sigma: float) -> np.ndarray:
    if radius >= spec.period_units / 2:
        raise AliasingError("bump radius must be below half the period")
    r2 = sum(o**2 for o in _wrapped_offsets(spec, center))
    t = 1.0 - r2 / radius**2
    # normalised so the peak is 1
    return gevrey_profile(t, sigma) / gevrey_profile(np.array([1.0]), sigma)[0]


def _plane_wave(spec: GridSpec, freq: np.ndarray) -> np.ndarray:
    step = spec.freq_step
    for w in freq:
        if abs(w / step - round(w / step)) > 1e-9:
            raise ValueError("modulation must be a multiple of 2*pi/L to stay periodic")
    phase = sum(w * x for w, x in zip(freq, spec.mesh()))
    return np.exp(1j * phase) * np.ones(spec.shape)


def _noise(spec: GridSpec, seed: int, bandwidth: float, real: bool) -> np.ndarray:
    # Coefficients depend only on (seed, L, bandwidth), not on n, so the same
    # trigonometric polynomial is sampled at every resolution.
    kmax = int(np.floor(bandwidth / spec.freq_step + 1e-9))
    if kmax >= spec.size // 2:
        raise ValueError("noise bandwidth exceeds the grid Nyquist frequency")
    rng = np.random.default_rng(seed)
    ks = np.arange(-kmax, kmax + 1)
    count = ks.size**spec.dim
    coef = (rng.standard_normal(count) + 1j * rng.standard_normal(count)) / np.sqrt(2.0)
    coef = coef.reshape((ks.size,) * spec.dim)
    if real:
        coef = 0.5 * (coef + np.conj(coef[(slice(None, None, -1),) * spec.dim]))
    hat = np.zeros(spec.shape, dtype=complex)
    sl = tuple(slice(spec.size // 2 - kmax, spec.size // 2 + kmax + 1) for _ in range(spec.dim))
    hat[sl] = coef
    # f(x) = sum_k coef_k exp(i xi_k x)
    data = ifft_centered(hat, _axes(spec)) * spec.size**spec.dim
    return data / np.sqrt(count)


def sample(descriptor: Mapping | str, spec: GridSpec) -> SampledSignal:
    """Evaluate a catalog function on the grid.

    ``descriptor`` is a mapping with a ``name`` key (or just the name):

    - ``zero``
    - ``constant``: ``value``
    - ``gaussian``: ``center``, ``width``, ``modulation``, ``amplitude``;
      unnormalised, peak ``amplitude`` at ``center``
    - ``bump``: Gevrey bump with ``center``, ``radius``, ``sigma``
    - ``plane_wave_bump``: ``bump`` times ``exp(i <modulation, x>)``
    - ``noise``: band-limited random trigonometric polynomial with
      ``seed``, ``bandwidth``, ``real``
    - ``boxcar``: indicator of ``[start, stop)`` per axis
    """
    if isinstance(descriptor, str):
        descriptor = {"name": descriptor}
    params = dict(descriptor)
    name = params.pop("name", None)
    d = spec.dim
    if name == "zero":
        data = np.zeros(spec.shape, dtype=complex)
    elif name == "constant":
        data = np.full(spec.shape, complex(params.get("value", 1.0)))
    elif name == "gaussian":
        center = _vec(params.get("center", 0.0), d)
        width = _vec(params.get("width", 1.0), d)
        data = params.get("amplitude", 1.0) * _periodized_gaussian(spec, center, width)
        if "modulation" in params:
            data = data * _plane_wave(spec, _vec(params["modulation"], d))
    elif name == "bump":
        data = _bump(spec, _vec(params.get("center", 0.0), d), float(params.get("radius", 1.0)),
                     float(params.get("sigma", 2.0)))
    elif name == "plane_wave_bump":
        bump = _bump(spec, _vec(params.get("center", 0.0), d), float(params.get("radius", 1.0)),
                     float(params.get("sigma", 2.0)))
        data = bump * _plane_wave(spec, _vec(params.get("modulation", 0.0), d))
    elif name == "noise":
        data = _noise(spec, int(params.get("seed", 0)), float(params.get("bandwidth", 4.0)),
                      bool(params.get("real", False)))
    elif name == "boxcar":
        start = _vec(params.get("start", 0.0), d)
        stop = _vec(params.get("stop", 1.0), d)
        data = np.ones(spec.shape, dtype=complex)
        for x, a, b in zip(spec.mesh(), start, stop):
            data = data * ((x >= a - 1e-12) & (x < b - 1e-12))
    else:
        raise UnknownDescriptorError(f"unknown signal descriptor {name!r}")
    return SampledSignal(spec, data)
