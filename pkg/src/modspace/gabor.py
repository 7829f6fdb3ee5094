"""Short-time Fourier transform, lattice Gabor expansions and phase-space operators.

Phase-space arrays put the ``d`` position axes first and the ``d``
frequency axes last.  Gabor coefficients live on ``Z^d x pi Z^d`` and are
stored for ``j in [-L/2, L/2)`` and ``iota = pi k`` with ``k in [-n, n)``,
which is every lattice frequency below Nyquist.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.fft as sfft

from .grid import GridMismatchError, GridSpec, SampledSignal, fft_centered, ifft_centered
from .seqspace import IndexedCoefficients

TWISTED_SIZE_CAP = 128
TAIL_LIMIT = 1e-10


class NyquistTailWarning(UserWarning):
    """Gabor coefficients near the Nyquist frequency carry non-negligible mass."""


class CostCapError(RuntimeError):
    pass


class WindowSupportError(ValueError):
    pass


@dataclass(frozen=True)
class DenseSTFT:
    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        expected = self.spec.shape * 2
        if self.values.shape != expected:
            raise GridMismatchError(f"phase-space array has shape {self.values.shape}, expected {expected}")

    @property
    def measure(self) -> float:
        return self.spec.cell_volume * self.spec.freq_cell_volume

    def with_values(self, values: np.ndarray) -> "DenseSTFT":
        return DenseSTFT(self.spec, values)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.measure))

    def inner(self, other: "DenseSTFT") -> complex:
        _same(self.spec, other.spec)
        return complex(np.vdot(other.values, self.values) * self.measure)

    def at(self, x, xi) -> complex:
        """Value at grid position ``x`` and frequency ``xi`` (both must be grid points)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        c = self.spec.size // 2
        idx = [self.spec.index_of(v) for v in x]
        kdx = [int(round(v / self.spec.freq_step)) + c for v in xi]
        return complex(self.values[tuple(idx + kdx)])


@dataclass(frozen=True)
class GaborCoefficients:
    """Gabor coefficients ``c(j, pi k)`` with ``values[j + L/2, k + n]``."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        d, L, n = self.spec.dim, self.spec.period_units, self.spec.samples_per_unit
        if self.values.shape != (L,) * d + (2 * n,) * d:
            raise GridMismatchError(f"coefficient table has shape {self.values.shape} for grid {self.spec}")

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GaborCoefficients":
        L, n = spec.period_units, spec.samples_per_unit
        return cls(spec, np.zeros((L,) * spec.dim + (2 * n,) * spec.dim, dtype=complex))

    def as_indexed(self, weight=None) -> IndexedCoefficients:
        d = self.spec.dim
        return IndexedCoefficients(
            self.values,
            (-self.spec.period_units // 2,) * d,
            (-self.spec.samples_per_unit,) * d,
            1.0,
            np.pi,
            weight,
        )

    def with_values(self, values: np.ndarray) -> "GaborCoefficients":
        return GaborCoefficients(self.spec, values)

    def tail_mass(self) -> float:
        """Relative l2 mass on frequencies within ``n/8`` of Nyquist."""
        d, n = self.spec.dim, self.spec.samples_per_unit
        k = np.abs(np.arange(-n, n))
        edge = k >= n - max(1, n // 8)
        mask = np.zeros((2 * n,) * d, dtype=bool)
        for a in range(d):
            shape = [1] * d
            shape[a] = 2 * n
            mask = mask | edge.reshape(shape)
        total = np.sum(np.abs(self.values) ** 2)
        if total == 0:
            return 0.0
        return float(np.sqrt(np.sum(np.abs(self.values[..., mask]) ** 2) / total))


def _same(a: GridSpec, b: GridSpec) -> None:
    if a != b:
        raise GridMismatchError(f"grids differ: {a} vs {b}")


def _gather(data: np.ndarray, index: np.ndarray, dim: int) -> np.ndarray:
    """Apply the same ``(P, Q)`` index table along every axis.

    Returns shape ``(P,)*dim + (Q,)*dim`` with ``out[p..., q...] = data[index[p, q]...]``.
    """
    out = data
    for a in range(dim):
        out = np.take(out, index, axis=2 * a)
    perm = [2 * a for a in range(dim)] + [2 * a + 1 for a in range(dim)]
    return out.transpose(perm)


def _shift_table(spec: GridSpec) -> np.ndarray:
    """``table[m, t]`` is the sample index of ``t - x_m`` on the periodic grid."""
    N, c = spec.size, spec.size // 2
    m = np.arange(N)
    return (m[None, :] - m[:, None] + c) % N


def _local_table(spec: GridSpec) -> np.ndarray:
    """``table[j, m]`` is the sample index of ``j + (m - n)/n`` for ``j in [-L/2, L/2)``."""
    L, n, N = spec.period_units, spec.samples_per_unit, spec.size
    j = np.arange(-L // 2, L // 2)
    m = np.arange(2 * n)
    return (N // 2 + j[:, None] * n + m[None, :] - n) % N


def _lattice_phase(spec: GridSpec) -> np.ndarray:
    """``exp(+-i pi k (j - 1))`` (both signs agree) as a ``(L,)*d + (2n,)*d`` array."""
    d, L, n = spec.dim, spec.period_units, spec.samples_per_unit
    j = np.arange(-L // 2, L // 2)
    k = np.arange(-n, n)
    # k (j - 1) is an integer, so the phase is +-1
    one = np.where((k[None, :] * (j[:, None] - 1)) % 2 == 0, 1.0, -1.0)
    out = np.ones((L,) * d + (2 * n,) * d)
    for a in range(d):
        shape = [1] * (2 * d)
        shape[a], shape[d + a] = L, 2 * n
        out = out * one.reshape(shape)
    return out


def stft_dense(f: SampledSignal, phi: SampledSignal) -> DenseSTFT:
    """``V_phi f(x, xi)``, the unitary transform of ``f * conj(phi(. - x))``, at every grid point."""
    _same(f.spec, phi.spec)
    spec = f.spec
    d = spec.dim
    shifted = _gather(phi.data, _shift_table(spec), d)
    prod = f.data[(None,) * d] * np.conj(shifted)
    axes = tuple(range(d, 2 * d))
    scale = (2 * np.pi) ** (-d / 2) * spec.cell_volume
    return DenseSTFT(spec, scale * fft_centered(prod, axes))


def adjoint_stft(F: DenseSTFT, phi: SampledSignal) -> SampledSignal:
    """``V_phi^* F(t) = (2 pi)^(-d/2) sum F(x, xi) phi(t - x) e^{i t xi}`` as a Riemann sum."""
    _same(F.spec, phi.spec)
    spec = F.spec
    d = spec.dim
    axes = tuple(range(d, 2 * d))
    inv = (2 * np.pi) ** (-d / 2) * spec.freq_cell_volume * spec.size**d * ifft_centered(F.values, axes)
    shifted = _gather(phi.data, _shift_table(spec), d)
    out = np.sum(shifted * inv, axis=tuple(range(d))) * spec.cell_volume
    return SampledSignal(spec, out)


def _check_window(phi: SampledSignal) -> None:
    spec = phi.spec
    outside = np.zeros(spec.shape, dtype=bool)
    for x in spec.mesh():
        outside = outside | (np.abs(x) >= 1.0)
    if np.any(phi.data[outside] != 0):
        raise WindowSupportError("analysis window must vanish outside (-1, 1)^d")


def analyze(f: SampledSignal, phi: SampledSignal, warn_tail: bool = True) -> GaborCoefficients:
    """Gabor coefficients ``2^-d (f, phi(. - j) e^{i <., iota>})`` on the lattice.

    Each ``j`` costs one ``2n``-point DFT per axis of ``f * phi(. - j)`` on
    ``j + [-1, 1)^d``.  Emits :class:`NyquistTailWarning` when the top band
    of frequencies holds more than ``1e-10`` of the relative mass.
    """
    _same(f.spec, phi.spec)
    _check_window(phi)
    spec = f.spec
    d, n = spec.dim, spec.samples_per_unit
    table = _local_table(spec)
    patches = _gather(f.data, table, d)
    c = spec.size // 2
    local_phi = phi.data[tuple(slice(c - n, c + n) for _ in range(d))]
    axes = tuple(range(d, 2 * d))
    spectrum = sfft.fftshift(sfft.fftn(patches * np.conj(local_phi), axes=axes), axes=axes)
    coeffs = GaborCoefficients(spec, (2.0 * n) ** (-d) * _lattice_phase(spec) * spectrum)
    if warn_tail:
        tail = coeffs.tail_mass()
        if tail > TAIL_LIMIT:
            warnings.warn(f"Gabor coefficient tail mass {tail:.2e} near Nyquist", NyquistTailWarning, stacklevel=2)
    return coeffs


def synthesize(c: GaborCoefficients, psi: SampledSignal) -> SampledSignal:
    """``sum_{j, iota} c(j, iota) psi(x - j) e^{i <x, iota>}`` on the grid."""
    _same(c.spec, psi.spec)
    spec = c.spec
    d, n = spec.dim, spec.samples_per_unit
    axes = tuple(range(d, 2 * d))
    local = sfft.ifftn(sfft.ifftshift(c.values * _lattice_phase(spec), axes=axes), axes=axes)
    local *= (2.0 * n) ** d
    cc = spec.size // 2
    local *= psi.data[tuple(slice(cc - n, cc + n) for _ in range(d))]
    table = _local_table(spec)
    index = []
    for a in range(d):
        shape = [1] * (2 * d)
        shape[a], shape[d + a] = table.shape
        index.append(table.reshape(shape))
    out = np.zeros(spec.shape, dtype=complex)
    np.add.at(out, tuple(np.broadcast_arrays(*index)), local)
    return SampledSignal(spec, out)


def twisted_convolve(F: DenseSTFT, G: DenseSTFT, force: bool = False) -> DenseSTFT:
    """``(2 pi)^(-d/2) sum_{y, eta} F(x - y, xi - eta) G(y, eta) e^{-i <y, xi - eta>}``.

    The sum over ``y`` is explicit; the sum over ``eta`` is a circular
    convolution along the frequency axes.  Grids with more than
    :data:`TWISTED_SIZE_CAP` points per position space are refused unless
    ``force`` is set.
    """
    _same(F.spec, G.spec)
    spec = F.spec
    d, N = spec.dim, spec.size
    if N**d > TWISTED_SIZE_CAP and not force:
        raise CostCapError(f"twisted convolution on {N**d} positions exceeds the cap of {TWISTED_SIZE_CAP}")
    pos = tuple(range(d))
    freq = tuple(range(d, 2 * d))
    c = N // 2
    zeta = np.meshgrid(*([spec.freqs()] * d), indexing="ij")
    ys = spec.mesh()
    # circular convolution in frequency: centred index arithmetic needs the
    # kernel rolled so that frequency 0 sits at index 0
    G_hat = sfft.fftn(sfft.ifftshift(G.values, axes=freq), axes=freq)
    out = np.zeros_like(F.values, dtype=complex)
    for m in np.ndindex(*spec.shape):
        y = np.array([ys[a][m] for a in range(d)])
        phase = np.exp(-1j * sum(y[a] * zeta[a] for a in range(d)))
        A = np.roll(F.values * phase, tuple(mm - c for mm in m), axis=pos)
        conv = sfft.ifftn(sfft.fftn(A, axes=freq) * G_hat[m], axes=freq)
        out += conv
    scale = (2 * np.pi) ** (-d / 2) * spec.cell_volume * spec.freq_cell_volume
    return DenseSTFT(spec, scale * out)


def project(F: DenseSTFT, phi: SampledSignal) -> DenseSTFT:
    """``P_phi F = ||phi||^-2 V_phi V_phi^* F``."""
    nrm2 = phi.norm() ** 2
    if nrm2 == 0:
        raise ValueError("projection needs a nonzero window")
    G = stft_dense(adjoint_stft(F, phi), phi)
    return G.with_values(G.values / nrm2)
