"""Multiplication and convolution computed through short-time Fourier transforms.

Convolutions use the normalized form ``(f * g)(x) = (2 pi)^(-d/2) int f(x - y) g(y) dy``,
the one under which the transform of ``f * g`` is the product of the
transforms.  On the periodic grid all integrals are Riemann sums, so the
circular convolutions below are exact discrete counterparts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import fft as sfft

from .gabor import DenseSTFT, adjoint_stft, stft_dense
from .grid import GridSpec, SampledSignal, check_same_grid, l2_inner, sample
from .modnorm import ModNormRequest, mod_norm
from .seqspace import INF, InadmissibleExponentsError, SLACK, inverse, parse_exponent, r_n, r_rn
from .weights import Weight, evaluate
from .windows import WindowPair

PAIRING_FLOOR = 1e-8
MAX_FACTORS = 4


class IllConditionedWindowsError(ValueError):
    pass


def circular_convolve(a: np.ndarray, b: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Circular convolution along ``axes`` of arrays stored in centered order."""
    fa = sfft.fftn(sfft.ifftshift(a, axes=axes), axes=axes)
    fb = sfft.fftn(sfft.ifftshift(b, axes=axes), axes=axes)
    return sfft.fftshift(sfft.ifftn(fa * fb, axes=axes), axes=axes)


def convolve_direct(f: SampledSignal, g: SampledSignal) -> SampledSignal:
    """``(2 pi)^(-d/2)`` times the circular Riemann-sum convolution of two grid signals."""
    check_same_grid(f, g)
    spec = f.spec
    axes = tuple(range(spec.dim))
    scale = (2 * np.pi) ** (-spec.dim / 2) * spec.cell_volume
    return f.with_data(scale * circular_convolve(f.data, g.data, axes))


def _fold(signals: Sequence[SampledSignal], kind: str) -> SampledSignal:
    out = signals[0]
    for s in signals[1:]:
        out = out.with_data(out.data * s.data) if kind == "multiply" else convolve_direct(out, s)
    return out


@dataclass(frozen=True)
class ProductRequest:
    """Windows ``phi_1..phi_N`` and the extraction window ``phi_0``.

    ``phi_0`` is rescaled on construction so that the pairing of the
    combined window with it equals ``(2 pi)^(-(N-1)d/2)`` for products and
    ``1`` for convolutions.
    """

    kind: str
    windows: tuple[SampledSignal, ...]
    phi0: SampledSignal
    pairing: complex = field(init=False)

    def __post_init__(self) -> None:
        if self.kind not in ("multiply", "convolve"):
            raise ValueError(f"kind must be 'multiply' or 'convolve', got {self.kind!r}")
        if not 2 <= len(self.windows) <= MAX_FACTORS:
            raise ValueError(f"between 2 and {MAX_FACTORS} factors are supported")
        check_same_grid(self.phi0, *self.windows)
        combined = _fold(self.windows, self.kind)
        raw = l2_inner(combined, self.phi0)
        if abs(raw) < PAIRING_FLOOR:
            raise IllConditionedWindowsError(f"window pairing {abs(raw):.2e} is too small to normalize")
        scale = np.conj(self.target / raw)
        object.__setattr__(self, "phi0", self.phi0.with_data(self.phi0.data * scale))
        object.__setattr__(self, "pairing", l2_inner(combined, self.phi0))

    @property
    def count(self) -> int:
        return len(self.windows)

    @property
    def spec(self) -> GridSpec:
        return self.phi0.spec

    @property
    def target(self) -> float:
        if self.kind == "multiply":
            return (2 * np.pi) ** (-(self.count - 1) * self.spec.dim / 2)
        return 1.0


def gaussian_request(kind: str, spec: GridSpec, count: int = 2, widths: Sequence[float] | None = None) -> ProductRequest:
    """Request with Gaussian windows; ``widths`` lists ``phi_1..phi_N`` then ``phi_0``."""
    widths = list(widths) if widths is not None else [1.0] * (count + 1)
    if len(widths) != count + 1:
        raise ValueError("need one width per factor window plus one for phi_0")
    wins = [sample({"name": "gaussian", "width": w}, spec) for w in widths]
    return ProductRequest(kind, tuple(wins[:-1]), wins[-1])


def pair_request(kind: str, pair: WindowPair, count: int = 2) -> ProductRequest:
    """Request built from the compactly supported analysis window of ``pair``."""
    return ProductRequest(kind, (pair.phi,) * count, pair.phi)


def _fiber_product(stfts: list[DenseSTFT], kind: str) -> DenseSTFT:
    spec = stfts[0].spec
    d = spec.dim
    if kind == "multiply":
        axes = tuple(range(d, 2 * d))
        scale = spec.freq_cell_volume
    else:
        axes = tuple(range(d))
        scale = (2 * np.pi) ** (-d / 2) * spec.cell_volume
    out = stfts[0].values
    for F in stfts[1:]:
        out = scale * circular_convolve(out, F.values, axes)
    return stfts[0].with_values(out)


def _apply(factors: Sequence[SampledSignal], req: ProductRequest, kind: str) -> SampledSignal:
    if req.kind != kind:
        raise ValueError(f"request is for {req.kind}, not {kind}")
    if len(factors) != req.count:
        raise ValueError(f"request has {req.count} windows for {len(factors)} factors")
    check_same_grid(req.phi0, *factors)
    stfts = [stft_dense(f, w) for f, w in zip(factors, req.windows)]
    return adjoint_stft(_fiber_product(stfts, kind), req.phi0)


def stft_multiply(factors: Sequence[SampledSignal], req: ProductRequest) -> SampledSignal:
    """``f_1 ... f_N`` from frequency-fiber convolutions of the factors' STFTs."""
    return _apply(factors, req, "multiply")


def stft_convolve(factors: Sequence[SampledSignal], req: ProductRequest) -> SampledSignal:
    """``f_1 * ... * f_N`` from position-fiber convolutions of the factors' STFTs."""
    return _apply(factors, req, "convolve")


def product_admissible(kind: str, flavor: str, p: Sequence[float], q: Sequence[float], p0: float, q0: float) -> bool:
    """Lebesgue exponent conditions for products (``kind="multiply"``) or convolutions.

    Multiplication on ``M`` pairs a Hoelder condition in ``p`` with a
    Young-type condition in ``q`` whose correction depends on ``p0``; on
    ``W`` the correction is the plain one.  Convolution swaps the roles
    of ``p`` and ``q``.
    """
    p = [parse_exponent(x) for x in p]
    q = [parse_exponent(x) for x in q]
    p0, q0 = parse_exponent(p0), parse_exponent(q0)

    def holder(e0, es):
        return inverse(e0) <= math.fsum(inverse(e) for e in es) + SLACK

    def young(e0, es, r):
        return inverse(e0) <= math.fsum(inverse(e) for e in es) - r + SLACK

    if kind == "multiply":
        correction = r_rn(p0, q) if flavor == "M" else r_n(q)
        return holder(p0, p) and young(q0, q, correction)
    if kind == "convolve":
        correction = r_n(p) if flavor == "M" else r_rn(q0, p)
        return young(p0, p, correction) and holder(q0, q)
    raise ValueError(f"unknown kind {kind!r}")


def weight_condition_constant(kind: str, w0: Weight, factors: Sequence[Weight], extent: float = 4.0, samples: int = 4000, seed: int = 0) -> float:
    """Sampled ``sup w0 / prod w_j`` over the configurations the product theorems constrain.

    Multiplication shares the position and adds the frequencies;
    convolution shares the frequency and adds the positions.
    """
    d = w0.dim // 2
    rng = np.random.default_rng(seed)
    n = len(factors)
    shared = rng.uniform(-extent, extent, (samples, d))
    split = rng.uniform(-extent, extent, (n, samples, d))
    total = split.sum(axis=0)
    den = np.ones(samples)
    for w, part in zip(factors, split):
        pts = np.concatenate([shared, part], axis=1) if kind == "multiply" else np.concatenate([part, shared], axis=1)
        den *= evaluate(w, pts)
    top = np.concatenate([shared, total], axis=1) if kind == "multiply" else np.concatenate([total, shared], axis=1)
    return float(np.max(evaluate(w0, top) / den))


@dataclass(frozen=True)
class ProductCheck:
    lhs: float
    rhs: float

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else INF
        return self.lhs / self.rhs


def product_norm_check(
    factors: Sequence[SampledSignal],
    p: Sequence[float],
    q: Sequence[float],
    p0: float,
    q0: float,
    window: WindowPair,
    kind: str = "multiply",
    flavor: str = "M",
    weights: Sequence[Weight] | None = None,
    req: ProductRequest | None = None,
) -> ProductCheck:
    """Lattice quasi-norm of the product (or convolution) against the product of the factors' norms.

    ``weights`` lists ``w_0, w_1, ..., w_N`` on phase space.
    """
    if not product_admissible(kind, flavor, p, q, p0, q0):
        raise InadmissibleExponentsError(f"exponents p={p}, q={q} -> ({p0}, {q0}) are inadmissible for {kind}")
    weights = list(weights) if weights is not None else [None] * (len(factors) + 1)
    if len(weights) != len(factors) + 1:
        raise ValueError("weights must list w_0 followed by one weight per factor")
    spec = factors[0].spec
    if req is None:
        req = gaussian_request(kind, spec, len(factors))
    out = stft_multiply(factors, req) if kind == "multiply" else stft_convolve(factors, req)
    lhs = mod_norm(out, ModNormRequest(p0, q0, window, flavor, weights[0]))
    rhs = 1.0
    for f, pj, qj, w in zip(factors, p, q, weights[1:]):
        rhs *= mod_norm(f, ModNormRequest(pj, qj, window, flavor, w))
    return ProductCheck(lhs, rhs)
