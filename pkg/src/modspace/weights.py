"""Symbolic weight descriptors and their moderateness classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable

import numpy as np


class WeightDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class Weight:
    """Positive weight on ``R^dim``.

    ``kind`` is one of ``"polynomial"`` (``<x>^t``), ``"subexp"``
    (``exp(r |x|^(1/s))``), ``"constant"`` (identically 1) or ``"split"``
    (``w1(x) * w2(xi)`` on ``R^(d1 + d2)``).
    """

    kind: str
    dim: int = 1
    t: float = 0.0
    r: float = 0.0
    s: float = 1.0
    parts: tuple["Weight", ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind not in ("polynomial", "subexp", "constant", "split"):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        if self.kind == "subexp" and (self.r <= 0 or self.s < 1):
            raise ValueError("subexponential weights need r > 0 and s >= 1")
        if self.kind == "split":
            if len(self.parts) != 2:
                raise ValueError("split weights have exactly two factors")
            object.__setattr__(self, "dim", self.parts[0].dim + self.parts[1].dim)

    # witness v and constant C with w(x + y) <= C w(x) v(y)
    @property
    def witness(self) -> "Weight":
        if self.kind == "polynomial":
            return polynomial(abs(self.t), self.dim)
        if self.kind == "split":
            return split(self.parts[0].witness, self.parts[1].witness)
        return self

    @property
    def witness_constant(self) -> float:
        if self.kind == "polynomial":
            return 2.0 ** (abs(self.t) / 2)
        if self.kind == "split":
            return self.parts[0].witness_constant * self.parts[1].witness_constant
        return 1.0

    def __call__(self, points) -> np.ndarray:
        return evaluate(self, points)

    def to_json(self) -> dict[str, Any]:
        if self.kind == "polynomial":
            return {"kind": "polynomial", "t": self.t, "dim": self.dim}
        if self.kind == "subexp":
            return {"kind": "subexp", "r": self.r, "s": self.s, "dim": self.dim}
        if self.kind == "constant":
            return {"kind": "constant", "dim": self.dim}
        return {"kind": "split", "x": self.parts[0].to_json(), "xi": self.parts[1].to_json()}


def polynomial(t: float, dim: int = 1) -> Weight:
    return Weight("polynomial", dim=dim, t=float(t))


def subexponential(r: float, s: float, dim: int = 1) -> Weight:
    return Weight("subexp", dim=dim, r=float(r), s=float(s))


def constant(dim: int = 1) -> Weight:
    return Weight("constant", dim=dim)


def split(w_x: Weight, w_xi: Weight) -> Weight:
    return Weight("split", parts=(w_x, w_xi))


def from_json(obj: dict[str, Any]) -> Weight:
    kind = obj.get("kind")
    dim = int(obj.get("dim", 1))
    if kind == "polynomial":
        return polynomial(obj["t"], dim)
    if kind == "subexp":
        return subexponential(obj["r"], obj["s"], dim)
    if kind == "constant":
        return constant(dim)
    if kind == "split":
        return split(from_json(obj["x"]), from_json(obj["xi"]))
    raise ValueError(f"unknown weight kind {kind!r}")


def evaluate(w: Weight, points) -> np.ndarray:
    """Evaluate ``w`` at points of shape ``(..., dim)``; a scalar is accepted for ``dim == 1``."""
    pts = np.asarray(points, dtype=float)
    if w.dim == 1 and (pts.ndim == 0 or pts.shape[-1] != 1):
        pts = pts[..., None]
    if pts.shape[-1] != w.dim:
        raise WeightDimensionError(f"weight on R^{w.dim} evaluated at points of dimension {pts.shape[-1]}")
    if w.kind == "split":
        d1 = w.parts[0].dim
        return evaluate(w.parts[0], pts[..., :d1]) * evaluate(w.parts[1], pts[..., d1:])
    if w.kind == "constant":
        return np.ones(pts.shape[:-1])
    norm2 = np.sum(pts**2, axis=-1)
    if w.kind == "polynomial":
        return (1.0 + norm2) ** (w.t / 2)
    return np.exp(w.r * norm2 ** (0.5 / w.s))


def eval(w: Weight, point) -> float:  # noqa: A001 - the operation's public name
    """Weight value at a single point."""
    value = evaluate(w, point)
    if value.ndim:
        if value.size != 1:
            raise WeightDimensionError("eval takes one point; use evaluate for batches")
        value = value.reshape(())
    return float(value)


def box_points(dim: int, extent: float, step: float) -> np.ndarray:
    axis = np.arange(-extent, extent + step / 2, step)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def moderate_constant(w: Weight, v: Weight, extent: float = 8.0, step: float = 1.0) -> float:
    """``max w(x + y) / (w(x) v(y))`` over the sampled box ``[-extent, extent]^dim``."""
    if w.dim != v.dim:
        raise WeightDimensionError("weights of different dimension")
    pts = box_points(w.dim, extent, step)
    wx = evaluate(w, pts)
    vy = evaluate(v, pts)
    worst = 0.0
    for start in range(0, len(pts), 512):
        x = pts[start : start + 512]
        num = evaluate(w, x[:, None, :] + pts[None, :, :])
        worst = max(worst, float(np.max(num / (wx[start : start + 512, None] * vy[None, :]))))
    return worst


def check_moderate(w: Weight, v: Weight, extent: float = 8.0, step: float = 1.0) -> tuple[bool, float]:
    """Whether ``w(x+y) <= C w(x) v(y)`` on the box with ``C`` within 1% of the declared constant."""
    c = moderate_constant(w, v, extent, step)
    return c <= 1.01 * w.witness_constant, c


def _ray_growth(w: Weight, v: Weight, extents=(8.0, 64.0)) -> float:
    """Ratio of the moderateness constants along the first axis on two box sizes."""
    e1 = np.zeros(w.dim)
    e1[0] = 1.0
    consts = []
    for extent in extents:
        t = np.linspace(0, extent, 257)
        x, y = np.meshgrid(t, t, indexing="ij")
        num = evaluate(w, (x + y)[..., None] * e1)
        den = evaluate(w, x[..., None] * e1) * evaluate(v, y[..., None] * e1)
        consts.append(float(np.max(num / den)))
    return consts[1] / consts[0]


def class_of(w: Weight, s_values: Iterable[float] = (1.0, 2.0, 3.0)) -> dict[str, Any]:
    """Membership in the exponentially moderate class and in each subexponential class.

    The answer comes from the kind.  For subexponential weights the record
    also carries ``grid_growth``: how much the moderateness constant against
    ``exp(r |y|^(1/s))`` grows along a ray when the box grows from 8 to 64.
    Members stay at 1; non-members blow up.
    """
    s_values = tuple(float(s) for s in s_values)
    if w.kind == "split":
        a = class_of(w.parts[0], s_values)
        b = class_of(w.parts[1], s_values)
        return {"in_PE": a["in_PE"] and b["in_PE"], "in_PEs": {s: a["in_PEs"][s] and b["in_PEs"][s] for s in s_values}}
    if w.kind != "subexp":
        return {"in_PE": True, "in_PEs": {s: True for s in s_values}}
    member, growth = {}, {}
    for s in s_values:
        member[s] = s <= w.s
        growth[s] = _ray_growth(w, subexponential(w.r, s, w.dim))
    return {"in_PE": True, "in_PEs": member, "grid_growth": growth}


def check_thm_weight_pair(
    w0: Weight, w01: Weight, w02: Weight, extent: float = 8.0, step: float = 1.0
) -> tuple[bool, float]:
    """Check ``w02(x) <= C w01(x) w0(x)``.

    Returns the smallest ``C`` on the box.  The inequality is accepted when
    the constant does not grow on doubling the box, so a polynomial deficit is
    caught even though every finite box yields a finite ratio.
    """
    if not w0.dim == w01.dim == w02.dim:
        raise WeightDimensionError("weights of different dimension")

    def const(e: float) -> float:
        pts = box_points(w0.dim, e, step)
        return float(np.max(evaluate(w02, pts) / (evaluate(w01, pts) * evaluate(w0, pts))))

    c = const(extent)
    return const(2 * extent) <= 1.01 * c, c


def convolution_constant(w0: Weight, factors: list[Weight], supports: list[np.ndarray]) -> float:
    """``max w0(x_1 + ... + x_N) / prod w_j(x_j)`` over points ``x_j`` in ``supports[j]``."""
    n = len(factors)
    total, den = 0.0, 1.0
    for j, (w, pts) in enumerate(zip(factors, supports)):
        pts = np.asarray(pts, dtype=float).reshape(len(pts), -1)
        shape = [1] * n + [pts.shape[-1]]
        shape[j] = len(pts)
        total = total + pts.reshape(shape)
        den = den * evaluate(w, pts).reshape(shape[:-1])
    return float(np.max(evaluate(w0, total) / den))


def product_constant(w0: Weight, factors: list[Weight], points: np.ndarray) -> float:
    """``max w0(x) / prod w_j(x)`` over ``points``."""
    den = np.prod([evaluate(w, points) for w in factors], axis=0)
    return float(np.max(evaluate(w0, points) / den))
