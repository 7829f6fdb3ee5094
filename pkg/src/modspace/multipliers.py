"""Step, Fourier step and slope step multipliers and their Gabor matrices.

Cells of the lattice ``b Z^d`` are half-open, ``[b m, b (m + 1))`` per axis,
so every grid point belongs to exactly one cell.  Symbols are stored as
tables over a wide, fixed range of cell indices so that the same symbol is
used on every grid resolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
import scipy.sparse as sp
from scipy.signal import fftconvolve

from .gabor import GaborCoefficients, analyze, synthesize
from .grid import GridSpec, SampledSignal, fourier, spectral_derivative
from .seqspace import INF, inverse, lp_norm, parse_exponent
from .windows import WindowPair

SYMBOL_RANGE = 4096
MAX_SAMPLED_ORDER = 8


class IncompatibleSymbolError(ValueError):
    pass


class BandViolationError(RuntimeError):
    pass


class SymbolOrderError(ValueError):
    pass


class LemmaExponentError(ValueError):
    pass


class EnvelopeTailError(RuntimeError):
    pass


def _cells(coords: np.ndarray, b: float) -> np.ndarray:
    # the small offset puts grid points that sit on a cell boundary into the right cell
    return np.floor(coords / b + 1e-9).astype(np.int64)


# ----------------------------------------------------------------------------
# constant step symbols


@dataclass(frozen=True)
class StepSymbol:
    """Values ``a0(b m)`` for cell indices ``m`` in a box starting at ``start``.

    Cells outside the table take ``default``; with ``default=None`` touching
    them raises :class:`IncompatibleSymbolError`.
    """

    b: tuple[float, ...]
    values: np.ndarray
    start: tuple[int, ...]
    default: complex | None = None

    def __post_init__(self) -> None:
        b = tuple(float(x) for x in np.atleast_1d(self.b))
        if any(x <= 0 for x in b):
            raise IncompatibleSymbolError("cell sizes must be positive")
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != len(b) or len(self.start) != len(b):
            raise IncompatibleSymbolError("symbol table dimension does not match b")
        vals.flags.writeable = False
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "start", tuple(int(s) for s in self.start))

    @property
    def dim(self) -> int:
        return len(self.b)

    @property
    def sup_norm(self) -> float:
        top = float(np.abs(self.values).max(initial=0.0))
        return max(top, abs(self.default)) if self.default is not None else top

    def evaluate(self, mesh: list[np.ndarray]) -> np.ndarray:
        """Symbol value at every point of a coordinate mesh (one array per axis)."""
        if len(mesh) != self.dim:
            raise IncompatibleSymbolError("mesh dimension does not match the symbol")
        idx = [_cells(x, b) - s for x, b, s in zip(mesh, self.b, self.start)]
        inside = np.ones(mesh[0].shape, dtype=bool)
        for i, m in zip(idx, self.values.shape):
            inside &= (i >= 0) & (i < m)
        if not inside.all() and self.default is None:
            raise IncompatibleSymbolError("grid reaches cells outside the symbol table")
        out = np.full(mesh[0].shape, 0j if self.default is None else complex(self.default))
        out[inside] = self.values[tuple(i[inside] for i in idx)]
        return out

    def to_json(self) -> dict[str, Any]:
        cells = []
        for m in np.ndindex(*self.values.shape):
            v = self.values[m]
            if self.default is not None and v == self.default:
                continue
            cells.append({"j": [s + i for s, i in zip(self.start, m)], "value": [v.real, v.imag]})
        out: dict[str, Any] = {"b": list(self.b), "cells": cells}
        if self.default is not None:
            out["default"] = [complex(self.default).real, complex(self.default).imag]
        return out


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def _table_range(dim: int, extent: int = SYMBOL_RANGE) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return (2 * extent,) * dim, (-extent,) * dim


def constant_symbol(value: complex = 1.0, b=1.0, dim: int = 1) -> StepSymbol:
    return StepSymbol(np.broadcast_to(np.asarray(b, float), (dim,)), np.full((1,) * dim, value), (0,) * dim, value)


def hilbert_symbol(b: float = 1.0) -> StepSymbol:
    """``a0(j) = -i sgn(j + b/2)``: the signum evaluated at each cell midpoint."""
    shape, start = _table_range(1)
    m = start[0] + np.arange(shape[0])
    return StepSymbol((b,), -1j * np.sign(m + 0.5), start)


def random_symbol(seed: int, b=1.0, dim: int = 1, unimodular: bool = False) -> StepSymbol:
    """Seeded symbol with ``sup |a0| <= 1`` over a wide fixed range of cells."""
    shape, start = _table_range(dim, SYMBOL_RANGE if dim == 1 else 256)
    rng = np.random.default_rng([seed, dim])
    phase = np.exp(2j * np.pi * rng.random(shape))
    values = phase if unimodular else phase * rng.random(shape)
    return StepSymbol(np.broadcast_to(np.asarray(b, float), (dim,)), values, start)


def symbol_from_json(obj: dict[str, Any]) -> StepSymbol:
    """Parse ``{"b": ..., "kind": "hilbert"|"random"|"constant"}`` or ``{"b": ..., "cells": [...]}``."""
    b = np.atleast_1d(np.asarray(obj.get("b", 1.0), dtype=float))
    kind = obj.get("kind")
    if kind == "hilbert":
        return hilbert_symbol(float(b[0]))
    if kind == "random":
        return random_symbol(int(obj.get("seed", 0)), b, len(b), bool(obj.get("unimodular", False)))
    if kind == "constant":
        return constant_symbol(_complex(obj.get("value", 1.0)), b, len(b))
    cells = obj.get("cells")
    if cells is None:
        raise IncompatibleSymbolError("symbol JSON needs 'kind' or 'cells'")
    default = _complex(obj.get("default", 0.0))
    if not cells:
        return constant_symbol(default, b, len(b))
    js = np.array([np.atleast_1d(c["j"]) for c in cells], dtype=int)
    lo, hi = js.min(axis=0), js.max(axis=0)
    table = np.full(tuple(hi - lo + 1), default, dtype=complex)
    for j, c in zip(js, cells):
        table[tuple(j - lo)] = _complex(c["value"])
    return StepSymbol(b, table, tuple(lo), default)


def step_apply(sym: StepSymbol, f: SampledSignal) -> SampledSignal:
    """Multiply ``f`` by the piecewise-constant symbol ``sum a0(j) chi_{j + Q_b}``."""
    spec = f.spec
    if sym.dim != spec.dim:
        raise IncompatibleSymbolError("symbol and signal dimensions differ")
    for b in sym.b:
        ratio = spec.period_units / b
        if abs(ratio - round(ratio)) > 1e-9:
            raise IncompatibleSymbolError(f"cells of size {b} do not tile the period {spec.period_units}")
    return f.with_data(f.data * sym.evaluate(spec.mesh()))


def fourier_step_apply(sym: StepSymbol, f: SampledSignal) -> SampledSignal:
    """``F^-1 M_{b, a0} F``; the Hilbert transform is ``hilbert_symbol()``."""
    spec = f.spec
    if sym.dim != spec.dim:
        raise IncompatibleSymbolError("symbol and signal dimensions differ")
    hat = fourier(f)
    return fourier(hat.with_data(hat.data * sym.evaluate(spec.freq_mesh())), "inverse")


# ----------------------------------------------------------------------------
# slope step symbols (one dimension)


@dataclass(frozen=True)
class SlopeSymbol:
    """Cell functions ``a0(j, x)`` on the cells ``j = b m`` of ``b Z``.

    Families (``u`` is the wrapped offset ``x - j``):

    * ``"polynomial"``: ``params["coeffs"][m] = (c0, c1, ...)``, ``a0 = sum c_k u^k``.
    * ``"trig"``: ``params`` holds per-cell ``amp``, ``freq`` and ``phase``,
      ``a0 = amp exp(i (freq u + phase))``.
    * ``"sampled"``: ``params["signals"][m]`` is a :class:`SampledSignal`
      giving ``a0(j, .)`` on the grid; derivatives are spectral.

    Per-cell tables start at cell index ``start``; cells outside the table
    carry the zero function.
    """

    b: float
    family: str
    params: dict = field(default_factory=dict)
    start: int = -SYMBOL_RANGE

    def __post_init__(self) -> None:
        if self.b <= 0:
            raise IncompatibleSymbolError("cell size must be positive")
        if self.family not in ("polynomial", "trig", "sampled"):
            raise ValueError(f"unknown slope family {self.family!r}")

    @property
    def count(self) -> int:
        key = {"polynomial": "coeffs", "trig": "amp", "sampled": "signals"}[self.family]
        return len(self.params[key])

    def derivative(self, cells: np.ndarray, x: np.ndarray, order: int, period: float | None = None) -> np.ndarray:
        """``d^order/dx^order a0(b m, x)`` for paired arrays of cell indices and points."""
        cells = np.asarray(cells, dtype=np.int64)
        x = np.asarray(x, dtype=float)
        cells, x = np.broadcast_arrays(cells, x)
        idx = cells - self.start
        inside = (idx >= 0) & (idx < self.count)
        safe = np.where(inside, idx, 0)
        u = x - self.b * cells
        if period is not None:
            u = (u + period / 2) % period - period / 2
        if self.family == "polynomial":
            coeffs = np.asarray(self.params["coeffs"], dtype=complex)
            out = np.zeros(x.shape, dtype=complex)
            for k in range(order, coeffs.shape[1]):
                fall = math.perm(k, order)
                out += fall * coeffs[safe, k] * u ** (k - order)
        elif self.family == "trig":
            amp = np.asarray(self.params["amp"], dtype=complex)[safe]
            freq = np.asarray(self.params["freq"], dtype=float)[safe]
            phase = np.asarray(self.params["phase"], dtype=float)[safe]
            out = amp * (1j * freq) ** order * np.exp(1j * (freq * u + phase))
        else:
            raise SymbolOrderError("sampled symbols are evaluated on their own grid; use sampled_derivatives")
        return np.where(inside, out, 0.0)

    def on_grid(self, spec: GridSpec, order: int = 0, domain: str = "time") -> tuple[np.ndarray, np.ndarray]:
        """``(cells, values)``: the own-cell index and ``d^order a0(j_x, x)`` at every grid point."""
        coords = spec.coords() if domain == "time" else spec.freqs()
        cells = _cells(coords, self.b)
        if self.family == "sampled":
            table = sampled_derivatives(self, spec, order)
            idx = cells - self.start
            inside = (idx >= 0) & (idx < self.count)
            vals = np.zeros(coords.shape, dtype=complex)
            pos = np.arange(coords.size)
            vals[inside] = table[idx[inside], pos[inside]]
            return cells, vals
        return cells, self.derivative(cells, coords, order)

    def to_json(self) -> dict[str, Any]:
        if self.family == "sampled":
            raise ValueError("sampled slope symbols are not JSON-serializable")

        def enc(a):
            a = np.asarray(a)
            return [[v.real, v.imag] for v in a.ravel()] if np.iscomplexobj(a) else a.tolist()

        params = {k: enc(v) if k != "coeffs" else [[[c.real, c.imag] for c in np.asarray(row, complex)] for row in v] for k, v in self.params.items()}
        return {"b": self.b, "family": self.family, "start": self.start, "params": params}


def slope_from_json(obj: dict[str, Any]) -> SlopeSymbol:
    family = obj["family"]
    raw = obj["params"]
    if family == "polynomial":
        params = {"coeffs": np.array([[complex(*c) if isinstance(c, list) else complex(c) for c in row] for row in raw["coeffs"]])}
    elif family == "trig":
        amp = raw["amp"]
        params = {
            "amp": np.array([complex(*a) if isinstance(a, list) else complex(a) for a in amp]),
            "freq": np.asarray(raw["freq"], dtype=float),
            "phase": np.asarray(raw["phase"], dtype=float),
        }
    else:
        raise ValueError(f"family {family!r} cannot be read from JSON")
    return SlopeSymbol(float(obj["b"]), family, params, int(obj.get("start", -SYMBOL_RANGE)))


def polynomial_slope(coeffs, b: float = 1.0, start: int | None = None) -> SlopeSymbol:
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    if start is None:
        start = -(len(coeffs) // 2)
    return SlopeSymbol(b, "polynomial", {"coeffs": coeffs}, start)


def random_polynomial_slope(seed: int, degree: int = 2, b: float = 1.0, cells: int = 512) -> SlopeSymbol:
    rng = np.random.default_rng([seed, degree])
    coeffs = rng.uniform(-1, 1, (cells, degree + 1)) / (1.0 + np.arange(degree + 1))
    return polynomial_slope(coeffs, b, -cells // 2)


def random_trig_slope(seed: int, max_freq: float = 3 * np.pi, b: float = 1.0, cells: int = 512) -> SlopeSymbol:
    rng = np.random.default_rng([seed, 7])
    params = {
        "amp": rng.uniform(0.5, 1.0, cells).astype(complex),
        "freq": rng.uniform(-max_freq, max_freq, cells),
        "phase": rng.uniform(0, 2 * np.pi, cells),
    }
    return SlopeSymbol(b, "trig", params, -cells // 2)


def sampled_derivatives(sym: SlopeSymbol, spec: GridSpec, order: int) -> np.ndarray:
    """Spectral derivatives of every sampled cell function, shape ``(cells, N)``."""
    if spec.dim != 1:
        raise IncompatibleSymbolError("slope symbols are one-dimensional")
    if order > MAX_SAMPLED_ORDER:
        raise SymbolOrderError(f"spectral derivatives of sampled symbols are limited to order {MAX_SAMPLED_ORDER}")
    rows = []
    for s in sym.params["signals"]:
        if s.spec != spec:
            raise IncompatibleSymbolError("sampled cell function lives on another grid")
        rows.append((spectral_derivative(s, order) if order else s).data)
    return np.array(rows)


def _check_slope(sym: SlopeSymbol, f: SampledSignal) -> None:
    if f.spec.dim != 1:
        raise IncompatibleSymbolError("slope multipliers are implemented in one dimension")


def slope_step_apply(sym: SlopeSymbol, f: SampledSignal) -> SampledSignal:
    """Multiply ``f`` on each cell ``j + [0, b)`` by ``a0(j, .)``."""
    _check_slope(sym, f)
    ratio = f.spec.period_units / sym.b
    if abs(ratio - round(ratio)) > 1e-9:
        raise IncompatibleSymbolError(f"cells of size {sym.b} do not tile the period")
    _, vals = sym.on_grid(f.spec)
    return f.with_data(f.data * vals)


def slope_fourier_apply(sym: SlopeSymbol, f: SampledSignal) -> SampledSignal:
    """``F^-1`` of the slope step multiplier acting on ``F f``."""
    _check_slope(sym, f)
    _, vals = sym.on_grid(f.spec, domain="freq")
    hat = fourier(f)
    return fourier(hat.with_data(hat.data * vals), "inverse")


def _period_cells(sym: SlopeSymbol, spec: GridSpec) -> np.ndarray:
    L = spec.period_units
    count = L / sym.b
    if abs(count - round(count)) > 1e-9:
        raise IncompatibleSymbolError(f"cells of size {sym.b} do not tile the period")
    return np.arange(-int(round(count)) // 2, int(round(count)) // 2)


def _cell_derivatives(sym: SlopeSymbol, spec: GridSpec, order: int) -> np.ndarray:
    """``d^order a0(j, x)`` for every period cell ``j`` (rows) and grid point ``x`` (columns)."""
    cells = _period_cells(sym, spec)
    if sym.family == "sampled":
        table = sampled_derivatives(sym, spec, order)
        idx = cells - sym.start
        out = np.zeros((len(cells), spec.size), dtype=complex)
        ok = (idx >= 0) & (idx < sym.count)
        out[ok] = table[idx[ok]]
        return out
    x = spec.coords()
    return sym.derivative(cells[:, None], x[None, :], order, period=spec.period_units)


def t_psi(sym: SlopeSymbol, psi: SampledSignal) -> SampledSignal:
    """``sum_j a0(j, .) psi(. - j)`` over the cells of one period."""
    spec = psi.spec
    if spec.dim != 1:
        raise IncompatibleSymbolError("slope symbols are one-dimensional")
    cells = _period_cells(sym, spec)
    vals = _cell_derivatives(sym, spec, 0)
    out = np.zeros(spec.size, dtype=complex)
    for row, j in zip(vals, cells):
        out += row * psi.shift(j * sym.b).data
    return SampledSignal(spec, out)


def envelope_alpha(sym: SlopeSymbol, alpha: int, spec: GridSpec) -> SampledSignal:
    """``max_{beta <= alpha} sup_j |d^beta a0(j, x)|`` on the grid."""
    env = np.zeros(spec.size)
    for beta in range(alpha + 1):
        env = np.maximum(env, np.abs(_cell_derivatives(sym, spec, beta)).max(axis=0))
    return SampledSignal(spec, env)


def envelope_h(sym: SlopeSymbol, h: float, sigma: float, max_order: int, spec: GridSpec) -> SampledSignal:
    """``sup_{k <= max_order} sup_j |d^k a0(j, x)| / (h^k k!^sigma)``.

    Raises :class:`EnvelopeTailError` when the top-order term exceeds ten
    times the previous one somewhere, i.e. the truncation is not yet in the
    decaying regime for this ``h``.
    """
    env = np.zeros(spec.size)
    prev = None
    for k in range(max_order + 1):
        term = np.abs(_cell_derivatives(sym, spec, k)).max(axis=0) / (h**k * math.factorial(k) ** sigma)
        env = np.maximum(env, term)
        if k == max_order and prev is not None and term.max() > 10 * prev.max() > 0:
            raise EnvelopeTailError(f"order {k} term still growing at h={h}")
        prev = term
    return SampledSignal(spec, env)


def envelope_constant(sym: SlopeSymbol, psi: SampledSignal, alpha: int, floor: float = 1e-12) -> float:
    """Smallest ``C`` with ``|d^alpha T_psi a0| <= C envelope_alpha`` on the grid."""
    t = t_psi(sym, psi)
    der = spectral_derivative(t, alpha) if alpha else t
    env = envelope_alpha(sym, alpha, psi.spec).data.real
    mask = env > floor * env.max()
    if np.any(np.abs(der.data[~mask]) > floor * max(1.0, np.abs(der.data).max())):
        return INF
    return float(np.max(np.abs(der.data[mask]) / env[mask]))


# ----------------------------------------------------------------------------
# Gabor matrices


@dataclass(frozen=True)
class OperatorGaborMatrix:
    """Entries ``a(jj, kk) = (pi/2)^{d/2} (T psi_jj, phi_kk)`` stored as ``matrix[kk, jj]``.

    Flat indices follow the C order of :class:`GaborCoefficients` tables.
    """

    spec: GridSpec
    matrix: sp.csr_matrix
    band: int | None
    outside_band: float

    def apply(self, c: GaborCoefficients) -> GaborCoefficients:
        """Coefficients of ``T f`` from those of ``f``: ``(2 pi)^(-d/2) sum_jj a(jj, kk) c(jj)``."""
        d = self.spec.dim
        out = (2 * np.pi) ** (-d / 2) * (self.matrix @ c.values.ravel())
        return c.with_values(out.reshape(c.values.shape))

    def lattice(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer ``(j, k)`` lattice indices of every flat position, shape ``(size, 2d)``."""
        d, L, n = self.spec.dim, self.spec.period_units, self.spec.samples_per_unit
        axes = [np.arange(-L // 2, L // 2)] * d + [np.arange(-n, n)] * d
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 2 * d)
        return grid[:, :d], grid[:, d:]

    def decay_certificate(self) -> float:
        """``max |a(jj, kk)| prod_m <iota_m - kappa_m>`` over stored entries.

        Frequency differences are taken modulo the lattice period ``2 pi n``,
        the discrete grid's frequency period.
        """
        coo = self.matrix.tocoo()
        _, ks = self.lattice()
        diff = np.pi * _periodic_gap(ks[coo.col], ks[coo.row], 2 * self.spec.samples_per_unit)
        weight = np.prod(np.sqrt(1.0 + diff**2), axis=1)
        return float(np.max(np.abs(coo.data) * weight, initial=0.0))

    def to_rows(self):
        """Coordinate-list rows ``(row, col, re, im)``."""
        coo = self.matrix.tocoo()
        for r, c, v in zip(coo.row, coo.col, coo.data):
            yield int(r), int(c), float(v.real), float(v.imag)


def _periodic_gap(j: np.ndarray, k: np.ndarray, L: int) -> np.ndarray:
    diff = np.abs(j - k) % L
    return np.minimum(diff, L - diff)


def gabor_matrix(
    apply: Callable[[SampledSignal], SampledSignal],
    pair: WindowPair,
    freq_band: int | None = None,
    band: int | None = 2,
    tol: float = 1e-12,
) -> OperatorGaborMatrix:
    """Assemble the Gabor matrix of a black-box operator column by column.

    With ``band`` set, entries whose position indices differ by more than
    ``band`` (per axis, periodically) must be below ``tol`` relative to the
    largest entry; they are dropped, otherwise :class:`BandViolationError`
    is raised.  ``freq_band`` keeps only ``|k_iota - k_kappa| <= freq_band``.
    """
    spec = pair.grid
    d, L, n = spec.dim, spec.period_units, spec.samples_per_unit
    psi, phi = pair.psi, pair.phi
    x = spec.mesh()
    shape = (L,) * d + (2 * n,) * d
    size = int(np.prod(shape))
    j_idx = np.stack(np.meshgrid(*([np.arange(-L // 2, L // 2)] * d), indexing="ij"), axis=-1).reshape(-1, d)
    k_idx = np.stack(np.meshgrid(*([np.arange(-n, n)] * d), indexing="ij"), axis=-1).reshape(-1, d)
    flat_j = np.repeat(j_idx, len(k_idx), axis=0)
    flat_k = np.tile(k_idx, (len(j_idx), 1))
    rows, cols, vals = [], [], []
    worst_outside, largest = 0.0, 0.0
    col = 0
    for j in j_idx:
        shifted = psi.shift(tuple(float(v) for v in j))
        for k in k_idx:
            mod = np.exp(1j * np.pi * sum(kk * xx for kk, xx in zip(k, x)))
            out = apply(shifted.with_data(shifted.data * mod))
            entries = (2 * np.pi) ** (d / 2) * analyze(out, phi, warn_tail=False).values.ravel()
            keep = np.abs(entries) > 0
            if band is not None:
                gap = _periodic_gap(flat_j, j, L).max(axis=1)
                outside = gap > band
                worst_outside = max(worst_outside, float(np.abs(entries[outside]).max(initial=0.0)))
                keep &= ~outside
            if freq_band is not None:
                keep &= np.abs(flat_k - k).max(axis=1) <= freq_band
            largest = max(largest, float(np.abs(entries).max(initial=0.0)))
            r = np.nonzero(keep)[0]
            rows.append(r)
            cols.append(np.full(r.size, col))
            vals.append(entries[r])
            col += 1
    if band is not None and worst_outside > tol * max(largest, 1.0):
        raise BandViolationError(f"entry {worst_outside:.3e} outside the band |j - k| <= {band}")
    matrix = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(size, size)
    )
    return OperatorGaborMatrix(spec, matrix, band, worst_outside)


# ----------------------------------------------------------------------------
# kernels and the singular convolution


def h0_kernel(points) -> np.ndarray:
    """``(<x_1> ... <x_d>)^-1`` for points of shape ``(..., d)`` (a bare array is one-dimensional)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts[None]
    return 1.0 / np.prod(np.sqrt(1.0 + pts**2), axis=-1) if pts.ndim > 1 else 1.0 / np.sqrt(1.0 + pts**2)


def chi_hat(xi) -> np.ndarray:
    """Unitary Fourier transform of the indicator of ``[0, 1]^d``; ``xi`` has shape ``(..., d)`` or is 1-D."""
    xi = np.asarray(xi, dtype=float)
    if xi.ndim <= 1:
        xi = xi[..., None]
    d = xi.shape[-1]
    factors = np.exp(-0.5j * xi) * np.sinc(xi / (2 * np.pi))
    return (2 * np.pi) ** (-d / 2) * np.prod(factors, axis=-1)


def _check_lemma(theta: float, p: float, q: float, relation: bool = True) -> None:
    if not (1 < p < INF and 1 < q < INF):
        raise LemmaExponentError("p and q must lie in (1, inf)")
    if not 0 < theta <= 1:
        raise LemmaExponentError("theta must lie in (0, 1]")
    if relation and abs(theta + 1 / p - 1 - 1 / q) > 1e-12:
        raise LemmaExponentError(f"theta + 1/p = {theta + 1 / p} differs from 1 + 1/q = {1 + 1 / q}")


def singular_kernel(theta: float, length: int) -> np.ndarray:
    """``<j>^-theta`` for ``j = -(length - 1), ..., length - 1``."""
    j = np.arange(-(length - 1), length)
    return h0_kernel(j) ** theta


def singular_convolve(theta: float, b, p: float, q: float) -> tuple[np.ndarray, float]:
    """Convolve ``b`` (length ``M``) with ``<j>^-theta`` and keep the same ``M`` indices.

    Returns the output and ``||out||_q / ||b||_p``.
    """
    p, q = parse_exponent(p), parse_exponent(q)
    _check_lemma(theta, p, q)
    b = np.asarray(getattr(b, "values", b), dtype=complex).ravel()
    M = b.size
    out = fftconvolve(singular_kernel(theta, M), b)[M - 1 : 2 * M - 1]
    denom = lp_norm(b, p)
    return out, (float(lp_norm(out, q)) / denom if denom else 0.0)


def singular_operator_norm(
    theta: float, p: float, q: float, length: int, iters: int = 2000, rtol: float = 1e-10, relation: bool = True
) -> float:
    """``l^p -> l^q`` norm of the truncated convolution by ``<j>^-theta`` on ``length`` points.

    Nonlinear power iteration for a nonnegative matrix with ``p <= q``;
    the kernel is even, so the transpose is the same convolution.
    ``relation=False`` skips the check of ``theta + 1/p = 1 + 1/q``.
    """
    p, q = parse_exponent(p), parse_exponent(q)
    _check_lemma(theta, p, q, relation)
    kernel = singular_kernel(theta, length)
    pstar = p / (p - 1)

    def op(v):
        return fftconvolve(kernel, v)[length - 1 : 2 * length - 1]

    x = np.ones(length) / length ** (1 / p)
    ratio = 0.0
    for _ in range(iters):
        y = np.maximum(op(x), 0.0)
        new_ratio = float(lp_norm(y, q) / lp_norm(x, p))
        z = np.maximum(op(y ** (q - 1)), 0.0)
        x = z ** (pstar - 1)
        x /= lp_norm(x, p)
        if abs(new_ratio - ratio) <= rtol * new_ratio:
            ratio = new_ratio
            break
        ratio = new_ratio
    return ratio


# ----------------------------------------------------------------------------
# exponent conditions


def _open(x: float, lo: float, hi: float = INF) -> bool:
    return lo < x < hi


def _half(x: float, lo: float) -> bool:
    return lo < x <= INF


def exponents_admissible(theorem: str, exponents: dict[str, float]) -> bool:
    """Exponent hypotheses of the step multiplier theorems, implemented literally.

    ``thm21``: ``p, q, q1, q2`` (step multipliers on ``W^{p,q}`` and ``M^{p,q1} -> M^{p,q2}``).
    ``thm22``: ``p, q, p1, p2`` (the Fourier step counterpart).
    ``thm41``/``thm42``: the slope step extensions with ``p, p1, p2, q, q1, q2``.
    ``cor41``/``cor42``: their corollaries, whose range for ``q1, q2`` (resp.
    ``p1, p2``) uses ``min(1, p)`` (resp. ``min(1, q)``) instead of
    ``min(1, p2)`` (resp. ``min(1, q2)``).
    Missing keys skip the conditions that mention them.
    """
    e = {k: parse_exponent(v) for k, v in exponents.items()}
    has = e.__contains__
    ok = True

    def cond(keys, test):
        nonlocal ok
        if all(has(k) for k in keys):
            ok = ok and bool(test())

    if theorem == "thm21":
        cond(["p"], lambda: _half(e["p"], 0))
        cond(["q"], lambda: _open(e["q"], 1))
        for k in ("q1", "q2"):
            cond(["p", k], lambda k=k: _open(e[k], min(1, e["p"])))
        cond(["p", "q1", "q2"], lambda: inverse(e["q1"]) - inverse(e["q2"]) >= max(inverse(e["p"]) - 1, 0) - 1e-12)
    elif theorem == "thm22":
        cond(["p"], lambda: _open(e["p"], 1))
        cond(["q"], lambda: _half(e["q"], 0))
        for k in ("p1", "p2"):
            cond(["q", k], lambda k=k: _open(e[k], min(1, e["q"])))
        cond(["q", "p1", "p2"], lambda: inverse(e["p1"]) - inverse(e["p2"]) >= max(inverse(e["q"]) - 1, 0) - 1e-12)
    elif theorem in ("thm41", "cor41"):
        for k in ("p", "p1", "p2"):
            cond([k], lambda k=k: _half(e[k], 0))
        cond(["q"], lambda: _open(e["q"], 1))
        ref = "p2" if theorem == "thm41" else "p"
        for k in ("q1", "q2"):
            cond([ref, k], lambda k=k: _open(e[k], min(1, e[ref])))
        cond(["p", "p1", "p2"], lambda: inverse(e["p2"]) - inverse(e["p1"]) <= inverse(e["p"]) + 1e-12)
        cond(["p2", "q1", "q2"], lambda: inverse(e["q1"]) - inverse(e["q2"]) >= max(inverse(e["p2"]) - 1, 0) - 1e-12)
    elif theorem in ("thm42", "cor42"):
        for k in ("q", "q1", "q2"):
            cond([k], lambda k=k: _half(e[k], 0))
        cond(["p"], lambda: _open(e["p"], 1))
        ref = "q2" if theorem == "thm42" else "q"
        for k in ("p1", "p2"):
            cond([ref, k], lambda k=k: _open(e[k], min(1, e[ref])))
        cond(["q", "q1", "q2"], lambda: inverse(e["q2"]) - inverse(e["q1"]) <= inverse(e["q"]) + 1e-12)
        cond(["q2", "p1", "p2"], lambda: inverse(e["p1"]) - inverse(e["p2"]) >= max(inverse(e["q2"]) - 1, 0) - 1e-12)
    else:
        raise ValueError(f"unknown theorem {theorem!r}")
    return ok


def discrepancy_zone(kind: str, exponents: dict[str, float]) -> bool:
    """Whether a slope theorem and its corollary disagree on these exponents (``kind`` is ``"41"`` or ``"42"``)."""
    return exponents_admissible(f"thm{kind}", exponents) != exponents_admissible(f"cor{kind}", exponents)
