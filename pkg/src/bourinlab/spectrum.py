"""Singular value functions on weighted block-diagonal trace models.

A semifinite algebra is modelled as a finite direct sum of matrix blocks
``M_{n_k}`` with trace ``sum_k w_k Tr``. Spectral projections of a block
operator are block aligned, so the singular value function mu(x) is an exact
step function: every singular value of block ``k`` contributes a step of
width ``w_k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .dense import InvalidInputError, as_matrix, singular_values

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class AlgebraModel:
    blocks: tuple[tuple[int, float], ...]

    def __post_init__(self):
        blocks = tuple((int(n), float(w)) for n, w in self.blocks)
        if not blocks:
            raise InvalidInputError("algebra model needs at least one block")
        for n, w in blocks:
            if n < 1 or not (w > 0.0) or not math.isfinite(w):
                raise InvalidInputError(f"bad block (size={n}, weight={w})")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def unweighted(cls, n: int) -> "AlgebraModel":
        return cls(((n, 1.0),))

    @classmethod
    def parse(cls, text: str) -> "AlgebraModel":
        """Parse ``"n1:w1,n2:w2,..."``."""
        blocks = []
        try:
            for part in text.split(","):
                size, weight = part.split(":")
                blocks.append((int(size), float(weight)))
        except ValueError as exc:
            raise InvalidInputError(f"bad block model {text!r}") from exc
        return cls(tuple(blocks))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(n for n, _ in self.blocks)

    @property
    def weights(self) -> tuple[float, ...]:
        return tuple(w for _, w in self.blocks)

    @property
    def total_trace(self) -> float:
        return sum(n * w for n, w in self.blocks)

    def doubled(self) -> "AlgebraModel":
        """Model of M_2(M) with trace tr (x) tau."""
        return AlgebraModel(tuple((2 * n, w) for n, w in self.blocks))

    def __str__(self) -> str:
        return ",".join(f"{n}:{w:g}" for n, w in self.blocks)


@dataclass(frozen=True)
class BlockOperator:
    model: AlgebraModel
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(as_matrix(b, "block") for b in self.blocks)
        if len(blocks) != len(self.model.blocks):
            raise InvalidInputError(
                f"expected {len(self.model.blocks)} blocks, got {len(blocks)}"
            )
        for b, n in zip(blocks, self.model.sizes):
            if b.shape != (n, n):
                raise InvalidInputError(f"block shape {b.shape} != ({n}, {n})")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def single(cls, a, weight: float = 1.0) -> "BlockOperator":
        a = as_matrix(a)
        return cls(AlgebraModel(((a.shape[0], weight),)), (a,))

    def map(self, fn: Callable[[np.ndarray], np.ndarray]) -> "BlockOperator":
        return BlockOperator(self.model, tuple(fn(b) for b in self.blocks))

    def adjoint(self) -> "BlockOperator":
        return self.map(lambda b: b.conj().T)

    def to_dense(self) -> np.ndarray:
        """Block-diagonal embedding (ignores weights)."""
        n = sum(self.model.sizes)
        out = np.zeros((n, n), dtype=np.complex128)
        i = 0
        for b in self.blocks:
            k = b.shape[0]
            out[i:i + k, i:i + k] = b
            i += k
        return out


def combine(fn, *ops: BlockOperator) -> BlockOperator:
    """Apply ``fn`` blockwise to operators sharing one model."""
    model = ops[0].model
    for op in ops[1:]:
        if op.model != model:
            raise InvalidInputError("operators live on different algebra models")
    return BlockOperator(model, tuple(fn(*bs) for bs in zip(*(op.blocks for op in ops))))


@dataclass(frozen=True, eq=False)
class SingularSpectrum:
    """Right-continuous non-increasing step function on [0, total_width).

    Stored in canonical form: values strictly decreasing, widths positive.
    """

    values: np.ndarray
    widths: np.ndarray

    @classmethod
    def from_pairs(cls, values, widths) -> "SingularSpectrum":
        values = np.asarray(values, dtype=float).ravel()
        widths = np.asarray(widths, dtype=float).ravel()
        if values.shape != widths.shape:
            raise InvalidInputError("values and widths differ in length")
        if np.any(values < 0) or np.any(widths < 0):
            raise InvalidInputError("spectrum values and widths must be non-negative")
        keep = widths > 0
        values, widths = values[keep], widths[keep]
        order = np.argsort(-values, kind="stable")
        values, widths = values[order], widths[order]
        if values.size > 1:
            starts = np.concatenate(([True], values[1:] != values[:-1]))
            idx = np.flatnonzero(starts)
            values = values[idx]
            widths = np.add.reduceat(widths, idx)
        return cls(values, widths)

    @classmethod
    def from_steps(cls, steps: Sequence[Sequence[float]]) -> "SingularSpectrum":
        if len(steps) == 0:
            return cls(np.zeros(0), np.zeros(0))
        arr = np.asarray(steps, dtype=float)
        return cls.from_pairs(arr[:, 0], arr[:, 1])

    @property
    def steps(self) -> list[tuple[float, float]]:
        return [(float(v), float(w)) for v, w in zip(self.values, self.widths)]

    @property
    def total_width(self) -> float:
        return float(np.sum(self.widths))

    @property
    def breakpoints(self) -> np.ndarray:
        return np.cumsum(self.widths)

    def to_json(self) -> dict:
        return {"steps": [[v, w] for v, w in self.steps]}

    @classmethod
    def from_json(cls, obj: dict) -> "SingularSpectrum":
        return cls.from_steps(obj["steps"])

    def __repr__(self) -> str:
        return f"SingularSpectrum({self.steps})"


def mu_of(x) -> SingularSpectrum:
    """Generalized singular value function of a block operator (or matrix)."""
    if not isinstance(x, BlockOperator):
        x = BlockOperator.single(x)
    vals = []
    wids = []
    for b, w in zip(x.blocks, x.model.weights):
        s = singular_values(b)
        vals.append(s)
        wids.append(np.full(s.shape, w))
    return SingularSpectrum.from_pairs(np.concatenate(vals), np.concatenate(wids))


def spectrum_from_values(values, weight: float = 1.0) -> SingularSpectrum:
    values = np.asarray(values, dtype=float)
    return SingularSpectrum.from_pairs(values, np.full(values.shape, weight))


def lambda_of(x, s: float) -> float:
    """Distribution function tau(e_(s, inf)(|x|))."""
    if s < 0:
        raise InvalidInputError("distribution function needs s >= 0")
    f = x if isinstance(x, SingularSpectrum) else mu_of(x)
    return float(np.sum(f.widths[f.values > s]))


def mu_at(f: SingularSpectrum, t: float) -> float:
    """Value of the step function at ``t`` (zero beyond the total width)."""
    return float(_values_at(f, np.array([t]))[0])


def _cumulative(f: SingularSpectrum, exact: bool = False):
    cum_w = np.cumsum(f.widths)
    terms = f.values * f.widths
    if exact:
        cum_i = np.array([math.fsum(terms[: k + 1]) for k in range(terms.size)])
    else:
        cum_i = np.cumsum(terms)
    return cum_w, cum_i


def _partial_integrals(f: SingularSpectrum, points, exact: bool = False, cum=None) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    cum_w, cum_i = _cumulative(f, exact) if cum is None else cum
    k = np.searchsorted(cum_w, points, side="right")
    prev_w = np.concatenate(([0.0], cum_w))[k]
    prev_i = np.concatenate(([0.0], cum_i))[k]
    vals = np.concatenate((f.values, [0.0]))[k]
    # exactly prev_i on breakpoints, since points - prev_w == 0 there
    return prev_i + vals * (points - prev_w)


def partial_integral(f: SingularSpectrum, a: float) -> float:
    if a < 0:
        raise InvalidInputError("partial integral needs a >= 0")
    return float(_partial_integrals(f, [a])[0])


class Submajorization(NamedTuple):
    holds: bool
    worst_margin: float
    worst_a: float
    scale: float  # 1 + integral of the dominating side


def submajorization_margins(
    g: SingularSpectrum, f: SingularSpectrum, exact: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """Breakpoints of either function and the margins G(a) - F(a) there."""
    cg, cf = _cumulative(g, exact), _cumulative(f, exact)
    pts = np.union1d(cg[0], cf[0])
    if pts.size == 0:
        return np.zeros(1), np.zeros(1)
    return pts, _partial_integrals(g, pts, cum=cg) - _partial_integrals(f, pts, cum=cf)


def submajorizes(
    g: SingularSpectrum, f: SingularSpectrum, tol: float = DEFAULT_TOL, exact: bool = False
) -> Submajorization:
    """Decide g << f (weak submajorization).

    Both partial integrals are piecewise linear with kinks only at the
    breakpoints, so it suffices to compare them there. The margin at a = 0 is
    identically zero and is not reported.
    """
    cg, cf = _cumulative(g, exact), _cumulative(f, exact)
    pts = np.union1d(cg[0], cf[0])
    if pts.size == 0:
        return Submajorization(True, 0.0, 0.0, 1.0)
    margins = _partial_integrals(g, pts, cum=cg) - _partial_integrals(f, pts, cum=cf)
    k = int(np.argmax(margins))
    scale = 1.0 + (float(cf[1][-1]) if cf[1].size else 0.0)
    worst = float(margins[k])
    return Submajorization(worst <= tol * scale, worst, float(pts[k]), scale)


def _refine(f: SingularSpectrum, g: SingularSpectrum):
    """Common refinement of two step functions, zero-extending the shorter."""
    pts = np.union1d(f.breakpoints, g.breakpoints)
    left = np.concatenate(([0.0], pts[:-1]))
    widths = pts - left
    mid = left + 0.5 * widths
    return _values_at(f, mid), _values_at(g, mid), widths


def _values_at(f: SingularSpectrum, ts: np.ndarray) -> np.ndarray:
    k = np.searchsorted(f.breakpoints, ts, side="right")
    return np.concatenate((f.values, [0.0]))[k]


def spectrum_sum(f: SingularSpectrum, g: SingularSpectrum) -> SingularSpectrum:
    """Pointwise sum mu(x) + mu(y) of two step functions."""
    fv, gv, w = _refine(f, g)
    return SingularSpectrum.from_pairs(fv + gv, w)


def spectrum_product(f: SingularSpectrum, g: SingularSpectrum) -> SingularSpectrum:
    fv, gv, w = _refine(f, g)
    return SingularSpectrum.from_pairs(fv * gv, w)


def spectrum_apply(f: SingularSpectrum, fn: Callable[[np.ndarray], np.ndarray]) -> SingularSpectrum:
    """Compose values with an increasing function ``fn``."""
    return SingularSpectrum.from_pairs(fn(f.values), f.widths)


def pointwise_excess(f: SingularSpectrum, g: SingularSpectrum) -> float:
    """max over t of f(t) - g(t); <= 0 means f <= g pointwise."""
    fv, gv, _ = _refine(f, g)
    return float(np.max(fv - gv)) if fv.size else 0.0


def merge(f: SingularSpectrum, g: SingularSpectrum) -> SingularSpectrum:
    """Spectrum of a direct sum."""
    return SingularSpectrum.from_pairs(
        np.concatenate((f.values, g.values)), np.concatenate((f.widths, g.widths))
    )


def scale_spectrum(f: SingularSpectrum, c: float) -> SingularSpectrum:
    if not c > 0:
        raise InvalidInputError("scale factor must be positive")
    return SingularSpectrum.from_pairs(f.values * c, f.widths)


@dataclass(frozen=True)
class NormSpec:
    kind: str  # "kyfan" | "schatten" | "operator" | "trace"
    param: float | None = None

    def __post_init__(self):
        if self.kind not in ("kyfan", "schatten", "operator", "trace"):
            raise InvalidInputError(f"unknown norm kind {self.kind!r}")
        if self.kind == "schatten" and not (self.param is not None and self.param >= 1):
            raise InvalidInputError("Schatten norm needs p >= 1")
        if self.kind == "kyfan" and not (self.param is not None and self.param > 0):
            raise InvalidInputError("Ky Fan norm needs a > 0")

    @classmethod
    def kyfan(cls, a: float) -> "NormSpec":
        return cls("kyfan", float(a))

    @classmethod
    def schatten(cls, p: float) -> "NormSpec":
        return cls("schatten", float(p))

    def __str__(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}({self.param:g})"


OPERATOR = NormSpec("operator")
TRACE = NormSpec("trace")


def norm_value(f: SingularSpectrum, spec: NormSpec) -> float:
    if spec.kind == "kyfan":
        if spec.param > f.total_width * (1 + 1e-12):
            raise InvalidInputError("Ky Fan parameter exceeds total width")
        return partial_integral(f, spec.param)
    if spec.kind == "operator" or (spec.kind == "schatten" and math.isinf(spec.param)):
        return float(f.values[0]) if f.values.size else 0.0
    if spec.kind == "trace":
        return float(np.sum(f.values * f.widths))
    p = spec.param
    return float(np.sum(f.values ** p * f.widths) ** (1.0 / p))


def default_norm_grid(*spectra: SingularSpectrum, schatten=(1.0, 2.0, 3.0, math.inf)):
    """Schatten norms plus Ky Fan norms at every breakpoint of ``spectra``."""
    grid = [NormSpec.schatten(p) for p in schatten]
    width = min(s.total_width for s in spectra)
    pts = np.unique(np.concatenate([s.breakpoints for s in spectra]))
    grid.extend(NormSpec.kyfan(a) for a in pts if 0 < a <= width)
    return grid
