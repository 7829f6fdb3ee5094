"""Compactly supported Gevrey window pairs forming a partition of unity.

The analysis window ``phi`` equals 1 on ``[-1/4, 1/4]^d``, vanishes outside
``[-3/4, 3/4]^d`` and its integer translates sum to one.  The synthesis
window ``psi`` equals 1 on ``[-3/4, 3/4]^d`` and vanishes outside
``[-1, 1]^d``.  Both are tensor products of one ramp
``r(t) = h(t) / (h(t) + h(1 - t))`` with ``h(t) = exp(-t^(-1/(sigma-1)))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.ndimage import maximum_filter1d

from .grid import GridSpec, SampledSignal, fourier, gevrey_profile, spectral_derivative


class WindowCertificationError(RuntimeError):
    pass


class GevreyNoiseError(RuntimeError):
    """Spectral derivatives grew faster than any Gevrey bound allows."""


class DecayFitError(ValueError):
    pass


def make_ramp(sigma: float) -> Callable[[np.ndarray], np.ndarray]:
    """Gevrey-``sigma`` transition from 0 (at ``t <= 0``) to 1 (at ``t >= 1``).

    ``r(t) + r(1 - t) == 1`` holds identically.
    """
    if sigma <= 1:
        raise ValueError("sigma must exceed 1")

    def ramp(t):
        t = np.asarray(t, dtype=float)
        a = gevrey_profile(t, sigma)
        b = gevrey_profile(1.0 - t, sigma)
        return a / (a + b)

    return ramp


@dataclass(frozen=True)
class WindowSpec:
    sigma: float
    grid: GridSpec

    def __post_init__(self) -> None:
        if self.sigma <= 1:
            raise ValueError("Gevrey order sigma must exceed 1")

    @property
    def dim(self) -> int:
        return self.grid.dim


@dataclass(frozen=True)
class WindowPair:
    phi: SampledSignal
    psi: SampledSignal
    spec: WindowSpec

    @property
    def grid(self) -> GridSpec:
        return self.spec.grid

    def local_phi(self) -> np.ndarray:
        """``phi`` on the ``2n``-point local grid ``[-1, 1)^d``."""
        return _local(self.phi)

    def local_psi(self) -> np.ndarray:
        return _local(self.psi)


def _local(w: SampledSignal) -> np.ndarray:
    spec = w.spec
    n, c = spec.samples_per_unit, spec.size // 2
    sl = tuple(slice(c - n, c + n) for _ in range(spec.dim))
    return np.array(w.data[sl].real)


def _profiles(grid: GridSpec, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    ramp = make_ramp(sigma)
    m = np.arange(grid.size)
    # |x| from integer arithmetic keeps the windows exactly even
    ax = np.abs(m - grid.size // 2) / grid.samples_per_unit
    phi = ramp(2.0 * (0.75 - ax))
    psi = ramp(4.0 * (1.0 - ax))
    return phi, psi


def _tensor(profile: np.ndarray, dim: int) -> np.ndarray:
    out = profile
    for _ in range(dim - 1):
        out = np.multiply.outer(out, profile)
    return out


def make_window_pair(spec: WindowSpec, tol: float = 1e-12) -> WindowPair:
    """Build and certify the window pair on ``spec.grid``."""
    grid = spec.grid
    if grid.samples_per_unit < 8:
        raise ValueError("window transition zones need at least 8 samples per unit")
    phi1, psi1 = _profiles(grid, spec.sigma)
    pair = WindowPair(
        SampledSignal(grid, _tensor(phi1, grid.dim)),
        SampledSignal(grid, _tensor(psi1, grid.dim)),
        spec,
    )
    report = certify(pair)
    bad = {k: v for k, v in report.items() if v > tol}
    if bad:
        raise WindowCertificationError(f"window pair failed certification: {bad}")
    return pair


def certify(pair: WindowPair) -> dict[str, float]:
    """Deviation of each window-pair invariant, measured on the grid."""
    grid = pair.grid
    phi, psi = pair.phi.data.real, pair.psi.data.real
    mesh = grid.mesh()
    sup = np.zeros(grid.shape, dtype=bool)
    inner_phi = np.ones(grid.shape, dtype=bool)
    outer_psi = np.zeros(grid.shape, dtype=bool)
    inner_psi = np.ones(grid.shape, dtype=bool)
    for x in mesh:
        ax = np.abs(x)
        sup = sup | (ax > 0.75)
        inner_phi = inner_phi & (ax <= 0.25)
        outer_psi = outer_psi | (ax >= 1.0)
        inner_psi = inner_psi & (ax <= 0.75)
    total = np.zeros(grid.shape)
    n = grid.samples_per_unit
    axes = tuple(range(grid.dim))
    for j in np.ndindex(*(grid.period_units,) * grid.dim):
        total += np.roll(phi, tuple(n * jj for jj in j), axis=axes)
    return {
        "range": float(max(-phi.min(), phi.max() - 1, -psi.min(), psi.max() - 1, 0.0)),
        "phi_support": float(np.max(np.abs(phi[sup]), initial=0.0)),
        "phi_plateau": float(np.max(np.abs(phi[inner_phi] - 1), initial=0.0)),
        "psi_support": float(np.max(np.abs(psi[outer_psi]), initial=0.0)),
        "psi_plateau": float(np.max(np.abs(psi[inner_psi] - 1), initial=0.0)),
        "partition": float(np.max(np.abs(total - 1))),
        "psi_phi": float(np.max(np.abs(psi * phi - phi))),
        "phi_even": float(np.max(np.abs(reflect(phi) - phi))),
        "psi_even": float(np.max(np.abs(reflect(psi) - psi))),
    }


def reflect(data: np.ndarray) -> np.ndarray:
    """Samples of ``x -> g(-x)`` on the centred periodic grid."""
    axes = tuple(range(data.ndim))
    return np.roll(np.flip(data, axes), 1, axes)


def gevrey_ratios(f: SampledSignal, h: float, sigma: float, max_order: int) -> np.ndarray:
    """``max_{|alpha| = k} ||d^alpha f||_inf / (h^k alpha!^sigma)`` for ``k <= max_order``.

    Raises :class:`GevreyNoiseError` when a term exceeds its predecessor by
    more than a factor 10, which the Gevrey bound at this ``h`` forbids.
    """
    d = f.spec.dim
    ratios = np.zeros(max_order + 1)
    for k in range(max_order + 1):
        best = 0.0
        for alpha in _multi_indices(d, k):
            der = spectral_derivative(f, alpha) if k else f
            fact = math.prod(math.factorial(a) for a in alpha)
            best = max(best, der.sup() / (h**k * fact**sigma))
        ratios[k] = best
        if k and ratios[k - 1] > 0 and ratios[k] > 10 * ratios[k - 1]:
            raise GevreyNoiseError(
                f"order {k}: ratio jumped from {ratios[k - 1]:.3e} to {ratios[k]:.3e} at h={h}"
            )
    return ratios


def gevrey_seminorm(f: SampledSignal, h: float, sigma: float, max_order: int) -> float:
    """Truncated Gevrey seminorm ``max_k ||d^k f||_inf / (h^k k!^sigma)``."""
    return float(gevrey_ratios(f, h, sigma, max_order).max())


def certify_gevrey(
    f: SampledSignal, sigma: float, max_order: int = 12, hs=(1, 2, 4, 8, 16, 32, 64)
) -> tuple[float, float]:
    """Smallest ``h`` in ``hs`` whose ratio sequence does not grow in its upper half.

    Returns ``(h, seminorm)``.  Raises :class:`GevreyNoiseError` if no ``h``
    qualifies.
    """
    half = max_order // 2
    for h in hs:
        try:
            r = gevrey_ratios(f, h, sigma, max_order)
        except GevreyNoiseError:
            continue
        if r[half + 1 :].max(initial=0.0) <= r[: half + 1].max():
            return float(h), float(r.max())
    raise GevreyNoiseError(f"no h in {tuple(hs)} bounds the derivative ratios")


def _multi_indices(d: int, k: int):
    if d == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _multi_indices(d - 1, k - first):
            yield (first,) + rest


def fourier_decay_fit(f: SampledSignal, sigma: float, floor: float = 1e-13) -> float:
    """Fit ``log|f^(xi)| ~ c - r |xi|^(1/sigma)`` on ``[Nyquist/8, Nyquist/2]``.

    One-dimensional slices only: for ``d > 1`` the fit uses the first axis
    through the origin.  The upper envelope of ``|f^|`` (running maximum over
    ``L`` samples) is fitted so zeros of oscillating transforms do not bias
    the slope.  Points below ``floor * max|f^|`` are dropped.
    """
    spec = f.spec
    hat = np.abs(fourier(f).data)
    if spec.dim > 1:
        c = spec.size // 2
        hat = hat[(slice(None),) + (c,) * (spec.dim - 1)]
    xi = spec.freqs()
    env = maximum_filter1d(hat, size=spec.period_units + 1, mode="wrap")
    band = (np.abs(xi) >= spec.nyquist / 8) & (np.abs(xi) <= spec.nyquist / 2)
    keep = band & (env > floor * hat.max())
    if keep.sum() < 8:
        raise DecayFitError("transform vanishes on the fitting band")
    u = np.abs(xi[keep]) ** (1.0 / sigma)
    slope, _ = np.polyfit(u, np.log(env[keep]), 1)
    return float(-slope)
