"""Modulation and Wiener-amalgam quasi-norm estimators."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from .gabor import DenseSTFT, analyze, stft_dense
from .grid import SampledSignal
from .seqspace import IndexedCoefficients, lp_norm, parse_exponent, quasi_norm
from .weights import Weight, check_moderate, evaluate
from .windows import WindowPair, certify

CERT_TOL = 1e-12


class UncertifiedRequestError(ValueError):
    pass


class ExponentOrderError(ValueError):
    pass


@dataclass(frozen=True)
class ModNormRequest:
    """``flavor`` is ``"M"`` (position norm inside) or ``"W"`` (frequency norm inside)."""

    p: float
    q: float
    window: WindowPair
    flavor: str = "M"
    weight: Weight | None = None
    mode: str = "lattice"

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", parse_exponent(self.p))
        object.__setattr__(self, "q", parse_exponent(self.q))
        if self.flavor not in ("M", "W"):
            raise ValueError(f"flavor must be 'M' or 'W', got {self.flavor!r}")
        if self.mode not in ("lattice", "dense"):
            raise ValueError(f"mode must be 'lattice' or 'dense', got {self.mode!r}")

    @property
    def order(self) -> str:
        return "plain" if self.flavor == "M" else "star"


@functools.lru_cache(maxsize=64)
def _weight_certified(w: Weight) -> bool:
    return check_moderate(w, w.witness)[0]


def validate(req: ModNormRequest) -> None:
    report = certify(req.window)
    bad = {k: v for k, v in report.items() if v > CERT_TOL}
    if bad:
        raise UncertifiedRequestError(f"window fails certification: {bad}")
    if req.weight is not None:
        if req.weight.dim != 2 * req.window.grid.dim:
            raise UncertifiedRequestError("modulation weights live on phase space R^(2d)")
        if not _weight_certified(req.weight):
            raise UncertifiedRequestError("weight is not moderate with respect to its witness")


def phase_space_points(F: DenseSTFT) -> np.ndarray:
    spec = F.spec
    axes = [spec.coords()] * spec.dim + [spec.freqs()] * spec.dim
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def dense_quasi_norm(F: DenseSTFT, p: float, q: float, weight: Weight | None = None, order: str = "plain") -> float:
    """Mixed Riemann quasi-norm ``L^{p,q}`` of a phase-space array with cell-volume weights."""
    p, q = parse_exponent(p), parse_exponent(q)
    spec = F.spec
    d = spec.dim
    v = np.abs(F.values)
    if weight is not None and weight.kind != "constant":
        v = v * evaluate(weight, phase_space_points(F))
    pos, freq = tuple(range(d)), tuple(range(d, 2 * d))

    def cell(e: float, vol: float) -> float:
        return 1.0 if e == math.inf else vol ** (1.0 / e)

    if order == "plain":
        inner = lp_norm(v, p, pos) * cell(p, spec.cell_volume)
        return float(lp_norm(inner, q) * cell(q, spec.freq_cell_volume))
    if order == "star":
        inner = lp_norm(v, q, freq) * cell(q, spec.freq_cell_volume)
        return float(lp_norm(inner, p) * cell(p, spec.cell_volume))
    raise ValueError(f"order must be 'plain' or 'star', got {order!r}")


def mod_norm(f: SampledSignal, req: ModNormRequest) -> float:
    """Modulation (``M``) or Wiener-type (``W``) quasi-norm of ``f``.

    Lattice mode takes the mixed sequence quasi-norm of the Gabor
    coefficients; dense mode integrates the sampled short-time Fourier
    transform.
    """
    validate(req)
    phi = req.window.phi
    if req.mode == "dense":
        return dense_quasi_norm(stft_dense(f, phi), req.p, req.q, req.weight, req.order)
    coeffs = analyze(f, phi, warn_tail=False).as_indexed(req.weight)
    return quasi_norm(coeffs, req.p, req.q, order=req.order)


def _overlap(starts: np.ndarray, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Overlap lengths of ``[s, s + width)`` with the unit cells ``[c, c + 1)``.

    Returns ``(cells, table)`` with ``table[cell, sample]``.
    """
    lo = math.floor(starts.min())
    hi = math.floor(starts.max() + width - 1e-12)
    cells = np.arange(lo, hi + 1)
    a = np.maximum(starts[None, :], cells[:, None])
    b = np.minimum(starts[None, :] + width, cells[:, None] + 1.0)
    table = np.clip(b - a, 0.0, None)
    table[table < 1e-12 * width] = 0.0
    return cells, table


def _cell_tables(F: DenseSTFT) -> list[tuple[np.ndarray, np.ndarray]]:
    spec = F.spec
    x = _overlap(spec.coords(), spec.step)
    xi = _overlap(spec.freqs(), spec.freq_step)
    return [x] * spec.dim + [xi] * spec.dim


def local_norms(F: DenseSTFT, r: float, weight: Weight | None = None) -> IndexedCoefficients:
    """``a(j, iota) = ||F w||_{L^r((j, iota) + [0, 1]^{2d})}`` for the piecewise-constant extension of ``F``."""
    r = parse_exponent(r)
    d = F.spec.dim
    v = np.abs(F.values)
    if weight is not None and weight.kind != "constant":
        v = v * evaluate(weight, phase_space_points(F))
    tables = _cell_tables(F)
    top = v.max()
    if top == 0:
        shape = [len(c) for c, _ in tables]
        return IndexedCoefficients(np.zeros(shape), tuple(int(c[0]) for c, _ in tables[:d]), tuple(int(c[0]) for c, _ in tables[d:]))
    out = v / top
    if r == math.inf:
        for axis, (_, table) in enumerate(tables):
            member = table > 0
            moved = np.moveaxis(out, axis, 0)
            reduced = np.stack([moved[m].max(axis=0) for m in member])
            out = np.moveaxis(reduced, 0, axis)
        values = top * out
    else:
        out = out**r
        for axis, (_, table) in enumerate(tables):
            out = np.moveaxis(np.tensordot(table, out, axes=([1], [axis])), 0, axis)
        values = top * out ** (1.0 / r)
    return IndexedCoefficients(
        values,
        tuple(int(c[0]) for c, _ in tables[:d]),
        tuple(int(c[0]) for c, _ in tables[d:]),
    )


def wiener_norm(
    F: DenseSTFT, r: float, p: float, q: float, weight: Weight | None = None, order: str = "plain"
) -> float:
    """Wiener-amalgam quasi-norm: local ``L^r`` norms on unit cubes, then the mixed ``l^{p,q}`` norm."""
    if F.spec.samples_per_unit < 4:
        raise ValueError("unit cubes need at least 4 samples per unit")
    return quasi_norm(local_norms(F, r, weight), p, q, order=order)


def embedding_check(
    f: SampledSignal, first: tuple[float, float], second: tuple[float, float], window: WindowPair, weight: Weight | None = None, flavor: str = "M"
) -> tuple[float, float, bool]:
    """Lattice norms for ``(p1, q1) <= (p2, q2)`` and whether the larger exponents give the smaller norm."""
    p1, q1 = map(parse_exponent, first)
    p2, q2 = map(parse_exponent, second)
    if p1 > p2 or q1 > q2:
        raise ExponentOrderError("embedding check needs p1 <= p2 and q1 <= q2")
    n1 = mod_norm(f, ModNormRequest(p1, q1, window, flavor, weight))
    n2 = mod_norm(f, ModNormRequest(p2, q2, window, flavor, weight))
    return n1, n2, n2 <= n1 * (1 + 1e-12)
