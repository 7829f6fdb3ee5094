"""Finite weighted sequences, mixed quasi-norms and the Hölder/Young engine.

Exponents are plain floats in ``(0, inf]``; :func:`parse_exponent` accepts
strings such as ``"1/2"`` or ``"inf"``.  Quasi-norms with exponents below 1
factor out the largest entry before raising to the power so that tiny
entries neither underflow nor dominate rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from scipy.signal import convolve as _direct_convolve

from .weights import (
    Weight,
    constant,
    convolution_constant,
    evaluate,
    polynomial,
    product_constant,
    subexponential,
)

INF = math.inf
EXPONENT_POOL = (1 / 3, 1 / 2, 2 / 3, 1.0, 3 / 2, 2.0, 4.0, INF)
SLACK = 1e-12


class InadmissibleExponentsError(ValueError):
    pass


class UncertifiedWeightError(ValueError):
    pass


class LatticeMismatchError(ValueError):
    pass


def parse_exponent(value) -> float:
    """Exponent in ``(0, inf]`` from a number or a string like ``"3/2"``."""
    if isinstance(value, str):
        text = value.strip().lower()
        p = INF if text in ("inf", "infinity", "∞") else float(Fraction(text))
    else:
        p = float(value)
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {value!r}")
    return p


def inverse(p: float) -> float:
    return 0.0 if p == INF else 1.0 / p


def format_exponent(p: float) -> str:
    if p == INF:
        return "inf"
    return str(Fraction(p).limit_denominator(64))


@dataclass(frozen=True)
class IndexedCoefficients:
    """Values on a finite box of a time-frequency lattice.

    ``values`` has ``len(time_start)`` leading time axes followed by
    ``len(freq_start)`` frequency axes.  Entry ``values[m..., k...]`` sits at
    lattice point ``((time_start + m) * time_step, (freq_start + k) * freq_step)``.
    A sequence on a single lattice has no frequency axes.
    """

    values: np.ndarray
    time_start: tuple[int, ...] = (0,)
    freq_start: tuple[int, ...] = ()
    time_step: float = 1.0
    freq_step: float = 1.0
    weight: Weight | None = None

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=complex)
        if vals.ndim != len(self.time_start) + len(self.freq_start):
            raise LatticeMismatchError(
                f"{vals.ndim}-axis table does not match {len(self.time_start)} time and "
                f"{len(self.freq_start)} frequency axes"
            )
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "time_start", tuple(int(s) for s in self.time_start))
        object.__setattr__(self, "freq_start", tuple(int(s) for s in self.freq_start))

    @classmethod
    def sequence(cls, values, start: int | Sequence[int] = 0, step: float = 1.0, weight: Weight | None = None):
        vals = np.asarray(values)
        start = (start,) * vals.ndim if np.isscalar(start) else tuple(start)
        return cls(vals, start, (), step, 1.0, weight)

    @property
    def time_ndim(self) -> int:
        return len(self.time_start)

    @property
    def freq_ndim(self) -> int:
        return len(self.freq_start)

    @property
    def time_shape(self) -> tuple[int, ...]:
        return self.values.shape[: self.time_ndim]

    @property
    def freq_shape(self) -> tuple[int, ...]:
        return self.values.shape[self.time_ndim :]

    def time_indices(self) -> list[np.ndarray]:
        return [s + np.arange(m) for s, m in zip(self.time_start, self.time_shape)]

    def freq_indices(self) -> list[np.ndarray]:
        return [s + np.arange(m) for s, m in zip(self.freq_start, self.freq_shape)]

    def points(self) -> np.ndarray:
        """Lattice coordinates of every entry, shape ``values.shape + (ndim,)``."""
        axes = [i * self.time_step for i in self.time_indices()]
        axes += [k * self.freq_step for k in self.freq_indices()]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def with_values(self, values) -> "IndexedCoefficients":
        return IndexedCoefficients(values, self.time_start, self.freq_start, self.time_step, self.freq_step, self.weight)

    def weighted_abs(self, weight: Weight | None = None) -> np.ndarray:
        weight = self.weight if weight is None else weight
        mag = np.abs(self.values)
        if weight is None or weight.kind == "constant":
            return mag
        pts = self.points()
        if weight.dim == self.time_ndim and self.freq_ndim:
            pts = pts[..., : self.time_ndim]
        elif weight.dim != pts.shape[-1]:
            raise LatticeMismatchError(f"weight on R^{weight.dim} does not fit a {pts.shape[-1]}-dimensional lattice")
        return mag * evaluate(weight, pts)

    def support_points(self) -> np.ndarray:
        """Coordinates of the nonzero entries (time axes only), shape ``(m, time_ndim)``."""
        mask = self.values != 0
        pts = self.points()[..., : self.time_ndim]
        return pts[mask]


def as_coefficients(a) -> IndexedCoefficients:
    return a if isinstance(a, IndexedCoefficients) else IndexedCoefficients.sequence(a)


def lp_norm(values, p: float, axis=None) -> np.ndarray | float:
    """``(sum |v|^p)^(1/p)`` over ``axis`` in max-factored form; ``p = inf`` is the supremum."""
    v = np.abs(np.asarray(values))
    if axis is None:
        axis = tuple(range(v.ndim))
    elif np.isscalar(axis):
        axis = (axis,)
    if not axis:
        return v
    if v.size == 0:
        return np.zeros([m for i, m in enumerate(v.shape) if i not in axis])
    top = np.max(v, axis=axis, keepdims=True)
    if p == INF:
        out = top
    else:
        safe = np.where(top > 0, top, 1.0)
        out = top * np.sum((v / safe) ** p, axis=axis, keepdims=True) ** (1.0 / p)
    out = np.squeeze(out, axis=axis)
    return float(out) if out.ndim == 0 else out


def quasi_norm(
    c, p: float, q: float | None = None, weight: Weight | None = None, order: str = "plain"
) -> float:
    """Weighted mixed quasi-norm of a coefficient table.

    ``order="plain"`` takes the ``p``-norm over the time axes first and then
    the ``q``-norm over the frequency axes; ``order="star"`` swaps the order.
    For a single-lattice sequence ``q`` is ignored.
    """
    c = as_coefficients(c)
    p = parse_exponent(p)
    q = p if q is None else parse_exponent(q)
    v = c.weighted_abs(weight)
    t_axes = tuple(range(c.time_ndim))
    f_axes = tuple(range(c.time_ndim, v.ndim))
    if order == "plain":
        inner = lp_norm(v, p, t_axes)
        return float(lp_norm(inner, q))
    if order == "star":
        inner = lp_norm(v, q, f_axes)
        return float(lp_norm(inner, p))
    raise ValueError(f"order must be 'plain' or 'star', got {order!r}")


def _nonempty(exponents: Iterable[float]) -> list[float]:
    ps = [parse_exponent(p) for p in exponents]
    if not ps:
        raise ValueError("need at least one exponent")
    return ps


def r_n(exponents: Iterable[float]) -> float:
    """``sum_j max(1, 1/p_j) - min_j max(1, 1/p_j)``."""
    terms = [max(1.0, inverse(p)) for p in _nonempty(exponents)]
    return math.fsum(terms) - min(terms)


def r_rn(r: float, exponents: Iterable[float]) -> float:
    """``sum_j 1/r_j - min_j 1/r_j`` with ``r_j = min(1, q_j, r)``."""
    r = parse_exponent(r)
    terms = [1.0 / min(1.0, q, r) for q in _nonempty(exponents)]
    return math.fsum(terms) - min(terms)


def young_admissible(p0: float, factors: Iterable[float]) -> bool:
    ps = _nonempty(factors)
    return inverse(parse_exponent(p0)) <= math.fsum(inverse(p) for p in ps) - r_n(ps) + SLACK


def holder_admissible(q0: float, factors: Iterable[float]) -> bool:
    qs = _nonempty(factors)
    return inverse(parse_exponent(q0)) <= math.fsum(inverse(q) for q in qs) + SLACK


def convolve(a, b) -> IndexedCoefficients:
    """Exact linear convolution of two single-lattice sequences."""
    a, b = as_coefficients(a), as_coefficients(b)
    if a.freq_ndim or b.freq_ndim:
        raise LatticeMismatchError("convolve takes single-lattice sequences")
    if a.time_step != b.time_step or a.time_ndim != b.time_ndim:
        raise LatticeMismatchError("sequences live on different lattices")
    out = _direct_convolve(a.values, b.values, mode="full", method="direct")
    start = tuple(s + t for s, t in zip(a.time_start, b.time_start))
    return IndexedCoefficients(out, start, (), a.time_step)


@dataclass(frozen=True)
class CheckResult:
    lhs: float
    rhs: float
    holds: bool
    constant: float = 1.0

    @property
    def ratio(self) -> float:
        if self.rhs == 0:
            return 0.0 if self.lhs == 0 else INF
        return self.lhs / self.rhs

    def as_row(self, trial_id: int, exponents: str) -> dict:
        return {
            "trial_id": trial_id,
            "exponents": exponents,
            "lhs": repr(self.lhs),
            "rhs": repr(self.rhs),
            "ratio": repr(self.ratio),
            "holds": self.holds,
        }


def _weights_or_default(weights, n: int) -> list[Weight | None]:
    if weights is None:
        return [None] * n
    weights = list(weights)
    if len(weights) != n:
        raise ValueError("one weight per factor")
    return weights


def _certify(constant: float) -> float:
    if not math.isfinite(constant):
        raise UncertifiedWeightError("weight condition has no finite constant on the support")
    return constant


def check_young(a_list, p_list, p0, weights=None, w0: Weight | None = None) -> CheckResult:
    """Compare ``||a_1 * ... * a_N||_{p0, w0}`` with ``C prod ||a_j||_{p_j, w_j}``.

    ``C`` is the exact maximum of ``w0(x_1 + ... + x_N) / prod w_j(x_j)`` over
    the supports of the factors.
    """
    seqs = [as_coefficients(a) for a in a_list]
    ps = [parse_exponent(p) for p in p_list]
    p0 = parse_exponent(p0)
    if len(seqs) != len(ps) or not seqs:
        raise ValueError("one exponent per factor")
    if not young_admissible(p0, ps):
        raise InadmissibleExponentsError(f"1/p0 exceeds sum 1/p_j - R_N for p0={p0}, p={ps}")
    ws = _weights_or_default(weights, len(seqs))
    conv = seqs[0]
    for s in seqs[1:]:
        conv = convolve(conv, s)
    lhs = quasi_norm(conv, p0, weight=w0)
    factors = [quasi_norm(s, p, weight=w) for s, p, w in zip(seqs, ps, ws)]
    const = 1.0
    if w0 is not None or any(w is not None for w in ws):
        supports = [s.support_points() for s in seqs]
        if all(len(s) for s in supports):
            dim = seqs[0].time_ndim
            w0_ = w0 if w0 is not None else constant(dim)
            const = _certify(convolution_constant(w0_, [w if w is not None else constant(dim) for w in ws], supports))
    rhs = const * math.prod(factors)
    return CheckResult(lhs, rhs, lhs <= rhs * (1 + SLACK), const)


def _common_box(seqs: list[IndexedCoefficients]) -> tuple[list[np.ndarray], tuple[int, ...]]:
    dim = seqs[0].time_ndim
    if any(s.time_ndim != dim or s.freq_ndim or s.time_step != seqs[0].time_step for s in seqs):
        raise LatticeMismatchError("sequences live on different lattices")
    lo = [min(s.time_start[i] for s in seqs) for i in range(dim)]
    hi = [max(s.time_start[i] + s.time_shape[i] for s in seqs) for i in range(dim)]
    out = []
    for s in seqs:
        full = np.zeros([h - l for l, h in zip(lo, hi)], dtype=complex)
        sl = tuple(slice(st - l, st - l + m) for st, l, m in zip(s.time_start, lo, s.time_shape))
        full[sl] = s.values
        out.append(full)
    return out, tuple(lo)


def check_holder(a_list, q_list, q0, weights=None, w0: Weight | None = None) -> CheckResult:
    """Compare ``||a_1 ... a_N||_{q0, w0}`` with ``C prod ||a_j||_{q_j, w_j}`` (pointwise product)."""
    seqs = [as_coefficients(a) for a in a_list]
    qs = [parse_exponent(q) for q in q_list]
    q0 = parse_exponent(q0)
    if len(seqs) != len(qs) or not seqs:
        raise ValueError("one exponent per factor")
    if not holder_admissible(q0, qs):
        raise InadmissibleExponentsError(f"1/q0 exceeds sum 1/q_j for q0={q0}, q={qs}")
    ws = _weights_or_default(weights, len(seqs))
    tables, lo = _common_box(seqs)
    prod = IndexedCoefficients(np.prod(tables, axis=0), lo, (), seqs[0].time_step)
    lhs = quasi_norm(prod, q0, weight=w0)
    factors = [quasi_norm(s, q, weight=w) for s, q, w in zip(seqs, qs, ws)]
    const = 1.0
    if w0 is not None or any(w is not None for w in ws):
        pts = prod.support_points()
        if len(pts):
            dim = prod.time_ndim
            w0_ = w0 if w0 is not None else constant(dim)
            const = _certify(product_constant(w0_, [w if w is not None else constant(dim) for w in ws], pts))
    rhs = const * math.prod(factors)
    return CheckResult(lhs, rhs, lhs <= rhs * (1 + SLACK), const)


def random_sequence(rng: np.random.Generator, max_len: int = 12, complex_values: bool | None = None) -> IndexedCoefficients:
    """Random finite sequence with magnitudes spread over several decades and random sparsity."""
    n = int(rng.integers(1, max_len + 1))
    mag = np.exp(rng.normal(0.0, 2.0, n)) * (rng.random(n) < 0.8)
    if complex_values is None:
        complex_values = bool(rng.integers(2))
    phase = np.exp(2j * np.pi * rng.random(n)) if complex_values else 1.0
    return IndexedCoefficients.sequence(mag * phase, int(rng.integers(-6, 7)))


def random_weight(rng: np.random.Generator) -> Weight:
    if rng.random() < 0.75:
        return polynomial(float(rng.choice([-2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0])))
    return subexponential(float(rng.choice([0.25, 0.5, 1.0])), float(rng.choice([1.0, 2.0, 3.0])))


def random_young_instance(rng: np.random.Generator, n_factors: int, weighted: bool) -> dict:
    """Admissible random Young instance drawn from :data:`EXPONENT_POOL`."""
    while True:
        ps = [float(rng.choice(EXPONENT_POOL)) for _ in range(n_factors)]
        choices = [p0 for p0 in EXPONENT_POOL if young_admissible(p0, ps)]
        if choices:
            break
    return {
        "a": [random_sequence(rng) for _ in range(n_factors)],
        "p": ps,
        "p0": float(rng.choice(choices)),
        "weights": [random_weight(rng) for _ in range(n_factors)] if weighted else None,
        "w0": random_weight(rng) if weighted else None,
    }


def random_holder_instance(rng: np.random.Generator, n_factors: int, weighted: bool) -> dict:
    """Admissible random Hölder instance on overlapping supports."""
    qs = [float(rng.choice(EXPONENT_POOL)) for _ in range(n_factors)]
    choices = [q0 for q0 in EXPONENT_POOL if holder_admissible(q0, qs)]
    return {
        "a": [random_sequence(rng) for _ in range(n_factors)],
        "q": qs,
        "q0": float(rng.choice(choices)),
        "weights": [random_weight(rng) for _ in range(n_factors)] if weighted else None,
        "w0": random_weight(rng) if weighted else None,
    }
