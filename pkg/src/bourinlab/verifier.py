"""Named numerical checks, one per inequality, each producing a CheckReport.

Statements quantified over every unitarily invariant (or fully symmetric)
norm are decided by weak submajorization of singular value functions, which
is equivalent to domination in all Ky Fan norms. Statements about a single
norm at a time, such as the Cauchy-Schwarz and Hoelder bounds, are checked
on an explicit grid of Schatten and Ky Fan norms.

Reported margins are relative: raw margin / (1 + size of the dominating
side), so ``holds`` is exactly ``worst_margin <= tolerance``.
"""
from __future__ import annotations

import hashlib
import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .dense import InvalidInputError, PsdMatrix, abs_power, as_matrix, is_hermitian
from .expressions import (
    RangeError,
    b_expr,
    b_expr_z,
    block_gram,
    check_t,
    direct_sum,
    f_expr,
    f_expr_z,
)
from .sampling import (
    SPECTRUM_LAWS,
    complex_gaussian,
    haar_unitary,
    random_block,
    random_block_psd,
    random_hermitian,
)
from .spectrum import (
    DEFAULT_TOL,
    AlgebraModel,
    BlockOperator,
    SingularSpectrum,
    default_norm_grid,
    mu_of,
    norm_value,
    pointwise_excess,
    scale_spectrum,
    spectrum_apply,
    spectrum_product,
    spectrum_sum,
    submajorizes,
)

INEQUALITY_IDS = (
    "bourin_pq",
    "bourin_t",
    "bourin_const_half",
    "f_const_2t1",
    "f_const_4t3",
    "b_const_upper",
    "b_const_lower",
    "thm_cauchy_schwarz_Bt",
    "cor_bt_ft",
    "prop_f34",
    "thm_ft",
    "thm_bt",
    "lem_3_6",
    "lem_3_8_1",
    "lem_3_8_2",
    "lem_3_2_holder",
    "lem_3_2_heinz",
    "lem_2_1_props",
    "lem_3_1_gram",
)

CATALOG = {
    "bourin_pq": "|||a^p b^q + b^p a^q||| <= |||a^(p+q) + b^(p+q)|||, p, q >= 0",
    "bourin_t": "|||x^t y^(1-t) + y^t x^(1-t)||| <= |||x + y|||",
    "bourin_const_half": "|||b_t||| <= 2^|1/2 - t| |||x + y|||, t in [0, 1]",
    "f_const_2t1": "|||f_t||| <= 2^(2t-1) |||x + y|||, t in [1/2, 1]",
    "f_const_4t3": "|||f_t||| <= 2^(4(t-3/4)) |||x + y|||, t in [3/4, 1]",
    "b_const_upper": "|||b_t||| <= 2^(2(t-3/4)) |||x + y|||, t in [3/4, 1]",
    "b_const_lower": "|||b_t||| <= 2^(2(1/4-t)) |||x + y|||, t in [0, 1/4]",
    "thm_cauchy_schwarz_Bt": "||B_t|| <= ||x + y||^(1/2) ||F_t||^(1/2), t in [1/2, 1]",
    "cor_bt_ft": "||b_t|| <= ||x + y||^(1/2) ||f_t||^(1/2), t in [1/2, 1]",
    "prop_f34": "||f_(3/4)|| <= ||x + y||",
    "thm_ft": "||f_t|| <= ||x + y||, t in [3/4, 1]",
    "thm_bt": "||b_t|| <= ||x + y||, t in [0, 1/4] u [3/4, 1]",
    "lem_3_6": "mu(x (+) y) << mu(x + y)",
    "lem_3_8_1": "xy self-adjoint => int_0^a mu(xy)^p <= int_0^a mu(yx)^p",
    "lem_3_8_2": "|xy|^r << x^r y^r, r >= 1",
    "lem_3_2_holder": "||ab|| <= || |a|^m ||^(1/m) || |b|^n ||^(1/n), 1/m + 1/n = 1",
    "lem_3_2_heinz": "2||x^(1/2) z y^(1/2)|| <= ||x^t z y^(1-t) + x^(1-t) z y^t|| <= ||xz + zy||;"
                     " ||x^t z y^(1-t)|| <= ||xz||^t ||zy||^(1-t)",
    "lem_2_1_props": "elementary properties of mu: items (1)-(6)",
    "lem_3_1_gram": "[[x + y, B_t], [B_t*, F_t]] >= 0, t in [1/2, 1]",
}

SCHATTEN_CROSS_CHECK = (1.0, 1.5, 2.0, 3.0, math.inf)


class ConsistencyError(RuntimeError):
    """Internal cross-checks disagree: a library bug, never a finding."""


def in_proved_range(t: float) -> bool:
    return t <= 0.25 or t >= 0.75


@dataclass
class CheckReport:
    check_id: str
    instance_fingerprint: str
    holds: bool
    worst_margin: float
    worst_location: float | str
    tolerance: float
    t: float | None = None
    proved: bool = True
    notes: str = ""

    def to_json(self) -> dict:
        return asdict(self)

    def to_jsonl(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj: dict) -> "CheckReport":
        return cls(**obj)


class PsdOperator:
    """A PSD block operator whose blocks carry cached spectral data."""

    __slots__ = ("model", "blocks", "_digest")

    def __init__(self, model: AlgebraModel, blocks: Sequence[PsdMatrix]):
        self.model = model
        self.blocks = tuple(blocks)
        if tuple(b.n for b in self.blocks) != model.sizes:
            raise InvalidInputError("block sizes do not match the algebra model")
        self._digest = None

    @classmethod
    def from_any(cls, x, name: str = "x") -> "PsdOperator":
        if isinstance(x, PsdOperator):
            return x
        if isinstance(x, BlockOperator):
            return cls(x.model, [PsdMatrix(b, name=name) for b in x.blocks])
        if isinstance(x, PsdMatrix):
            return cls(AlgebraModel.unweighted(x.n), [x])
        m = PsdMatrix(x, name=name)
        return cls(AlgebraModel.unweighted(m.n), [m])

    def as_block(self) -> BlockOperator:
        return BlockOperator(self.model, tuple(b.data for b in self.blocks))

    @property
    def digest(self) -> bytes:
        if self._digest is None:
            self._digest = _digest_blocks(self.model, [b.data for b in self.blocks])
        return self._digest


def _digest_blocks(model: AlgebraModel, blocks) -> bytes:
    h = hashlib.sha256(repr(model.blocks).encode())
    for b in blocks:
        h.update(np.ascontiguousarray(b, dtype=np.complex128).tobytes())
    return h.digest()


def _general(a, model: AlgebraModel) -> BlockOperator:
    if isinstance(a, PsdOperator):
        a = a.as_block()
    if not isinstance(a, BlockOperator):
        a = BlockOperator.single(as_matrix(a), weight=model.weights[0]) \
            if len(model.blocks) == 1 else None
        if a is None:
            raise InvalidInputError("a plain matrix only fits single-block models")
    if a.model != model:
        raise InvalidInputError("operator lives on a different algebra model")
    return a


def _operands(x, y) -> tuple[PsdOperator, PsdOperator]:
    x, y = PsdOperator.from_any(x, "x"), PsdOperator.from_any(y, "y")
    if x.model != y.model:
        raise InvalidInputError(f"model mismatch: {x.model} vs {y.model}")
    return x, y


def fingerprint(*parts) -> str:
    """Deterministic content hash of operators and scalar parameters."""
    h = hashlib.sha256()
    for p in parts:
        if isinstance(p, PsdOperator):
            h.update(p.digest)
        elif isinstance(p, BlockOperator):
            h.update(_digest_blocks(p.model, p.blocks))
        else:
            h.update(repr(p).encode())
        h.update(b"|")
    return h.hexdigest()[:16]


def _blockwise(fn: Callable, model: AlgebraModel, *ops) -> BlockOperator:
    return BlockOperator(model, tuple(fn(*bs) for bs in zip(*ops)))


def _sum(x: PsdOperator, y: PsdOperator) -> BlockOperator:
    return _blockwise(lambda a, b: a.data + b.data, x.model, x.blocks, y.blocks)


def _schatten_all(f: SingularSpectrum, ps: np.ndarray) -> np.ndarray:
    finite = ps[np.isfinite(ps)]
    vals = (f.values[None, :] ** finite[:, None] * f.widths[None, :]).sum(axis=1) ** (1.0 / finite)
    top = f.values[0] if f.values.size else 0.0
    return np.concatenate((vals, np.full(ps.size - finite.size, top)))


_CROSS_P = np.array(SCHATTEN_CROSS_CHECK)


def _cross_check(g: SingularSpectrum, f: SingularSpectrum, raw: float, scale: float) -> None:
    """Submajorization must imply domination in every Schatten norm."""
    if g.values.size == 0:
        return
    min_w = min(float(np.min(g.widths)), float(np.min(f.widths)) if f.widths.size else 1.0)
    slack = 4.0 * (max(raw, 0.0) + 1e-12 * scale) * (1.0 + 1.0 / min_w)
    lhs, rhs = _schatten_all(g, _CROSS_P), _schatten_all(f, _CROSS_P)
    bad = lhs > rhs + slack * (1.0 + rhs)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise ConsistencyError(
            f"submajorization holds but Schatten-{_CROSS_P[k]} norms disagree: "
            f"{lhs[k]} > {rhs[k]}"
        )


def _submaj_report(
    check_id, g, f, tol, fp, t=None, proved=True, notes="", exact=False, cross_check=True
) -> CheckReport:
    res = submajorizes(g, f, tol, exact=exact)
    margin = res.worst_margin / res.scale
    holds = margin <= tol
    if holds and cross_check:
        _cross_check(g, f, res.worst_margin, res.scale)
    return CheckReport(check_id, fp, holds, margin, res.worst_a, tol, t, proved, notes)


def _per_norm_report(check_id, rows, tol, fp, t=None, notes="") -> CheckReport:
    """rows: (norm label, lhs, rhs); margin (lhs - rhs) / (1 + rhs)."""
    worst, where = -math.inf, ""
    for label, lhs, rhs in rows:
        m = (lhs - rhs) / (1.0 + rhs)
        if m > worst:
            worst, where = m, label
    return CheckReport(check_id, fp, worst <= tol, float(worst), where, tol, t, True, notes)


def _equality_report(check_id, pairs, tol, fp, scale, notes="") -> CheckReport:
    """pairs: (label, f, g) spectra that should coincide."""
    worst, where = -math.inf, ""
    for label, f, g in pairs:
        m = max(pointwise_excess(f, g), pointwise_excess(g, f)) / scale
        if m > worst:
            worst, where = m, label
    return CheckReport(check_id, fp, worst <= tol, float(worst), where, tol, None, True, notes)


def _spectra_grid(*spectra, schatten=(1.0, 2.0, 3.0, math.inf)):
    return default_norm_grid(*spectra, schatten=schatten)


# -- the main inequality and its constant-factor relatives --------------------


def bourin_t_spectra(x: PsdOperator, y: PsdOperator, t: float):
    lhs = mu_of(_blockwise(lambda a, b: b_expr(a, b, t), x.model, x.blocks, y.blocks))
    return lhs, mu_of(_sum(x, y))


def check_bourin_t(x, y, t: float, tol: float = DEFAULT_TOL, exact: bool = False,
                   check_id: str = "bourin_t") -> CheckReport:
    x, y = _operands(x, y)
    t = check_t(t)
    lhs, rhs = bourin_t_spectra(x, y, t)
    proved = in_proved_range(t)
    return _submaj_report(
        check_id, lhs, rhs, tol, fingerprint(x, y, t), t, proved,
        "proved range" if proved else "open range", exact=exact, cross_check=proved,
    )


def check_bourin_pq(a, b, p: float, q: float, tol: float = DEFAULT_TOL) -> CheckReport:
    p, q = float(p), float(q)
    if p < 0 or q < 0 or not p + q > 0:
        raise InvalidInputError("need p, q >= 0 and p + q > 0")
    a, b = _operands(a, b)
    s = p + q
    ap = PsdOperator(a.model, [PsdMatrix(m.power(s)) for m in a.blocks])
    bp = PsdOperator(b.model, [PsdMatrix(m.power(s)) for m in b.blocks])
    report = check_bourin_t(ap, bp, p / s, tol, check_id="bourin_pq")
    report.instance_fingerprint = fingerprint(a, b, p, q)
    report.notes = f"p={p:g} q={q:g} -> t={p / s:g}, {report.notes}"
    return report


CONSTANT_BOUNDS = (
    # (check_id, expression, t-range, constant)
    ("bourin_const_half", "b", (0.0, 1.0), lambda t: 2.0 ** abs(0.5 - t)),
    ("f_const_2t1", "f", (0.5, 1.0), lambda t: 2.0 ** (2.0 * t - 1.0)),
    ("f_const_4t3", "f", (0.75, 1.0), lambda t: 2.0 ** (4.0 * (t - 0.75))),
    ("b_const_upper", "b", (0.75, 1.0), lambda t: 2.0 ** (2.0 * (t - 0.75))),
    ("b_const_lower", "b", (0.0, 0.25), lambda t: 2.0 ** (2.0 * (0.25 - t))),
)


def check_constant_bounds(x, y, t: float, tol: float = DEFAULT_TOL) -> list[CheckReport]:
    """Every constant-factor bound whose stated range contains ``t``."""
    x, y = _operands(x, y)
    t = check_t(t)
    rhs = mu_of(_sum(x, y))
    cache: dict[str, SingularSpectrum] = {}

    def lhs(kind):
        if kind not in cache:
            fn = b_expr if kind == "b" else f_expr
            cache[kind] = mu_of(_blockwise(lambda a, b: fn(a, b, t), x.model, x.blocks, y.blocks))
        return cache[kind]

    fp = fingerprint(x, y, t)
    reports = []
    for check_id, kind, (lo, hi), const in CONSTANT_BOUNDS:
        if not lo <= t <= hi:
            continue
        c = const(t)
        reports.append(_submaj_report(
            check_id, lhs(kind), scale_spectrum(rhs, c), tol, fp, t, True, f"constant={c!r}"
        ))
    return reports


def check_ft(x, y, t: float, tol: float = DEFAULT_TOL) -> CheckReport:
    t = float(t)
    if not 0.75 <= t <= 1.0:
        raise RangeError(f"the f_t bound is only claimed on [3/4, 1], got t={t}")
    x, y = _operands(x, y)
    lhs = mu_of(_blockwise(lambda a, b: f_expr(a, b, t), x.model, x.blocks, y.blocks))
    check_id = "prop_f34" if t == 0.75 else "thm_ft"
    return _submaj_report(check_id, lhs, mu_of(_sum(x, y)), tol, fingerprint(x, y, t), t)


# -- per-norm theorems ---------------------------------------------------------


def _cs_rows(big: SingularSpectrum, s: SingularSpectrum, f: SingularSpectrum, norm_grid):
    grid = norm_grid if norm_grid is not None else _spectra_grid(big, s, f)
    rows = []
    for spec in grid:
        rhs = math.sqrt(norm_value(s, spec) * norm_value(f, spec))
        rows.append((str(spec), norm_value(big, spec), rhs))
    return rows


def check_thm_cauchy_schwarz_Bt(x, y, z, t: float, norm_grid=None,
                                tol: float = DEFAULT_TOL) -> CheckReport:
    x, y = _operands(x, y)
    t = check_t(t, 0.5)
    z = _general(z, x.model)
    big = mu_of(_blockwise(lambda a, b, c: b_expr_z(a, b, c, t), x.model, x.blocks, y.blocks, z.blocks))
    f = mu_of(_blockwise(lambda a, b, c: f_expr_z(a, b, c, t), x.model, x.blocks, y.blocks, z.blocks))
    rows = _cs_rows(big, mu_of(_sum(x, y)), f, norm_grid)
    return _per_norm_report("thm_cauchy_schwarz_Bt", rows, tol, fingerprint(x, y, z, t), t)


def check_cor_bt_ft(x, y, t: float, norm_grid=None, tol: float = DEFAULT_TOL) -> CheckReport:
    x, y = _operands(x, y)
    t = check_t(t, 0.5)
    b = mu_of(_blockwise(lambda p, q: b_expr(p, q, t), x.model, x.blocks, y.blocks))
    f = mu_of(_blockwise(lambda p, q: f_expr(p, q, t), x.model, x.blocks, y.blocks))
    rows = _cs_rows(b, mu_of(_sum(x, y)), f, norm_grid)
    return _per_norm_report("cor_bt_ft", rows, tol, fingerprint(x, y, t), t)


# -- lemmas --------------------------------------------------------------------


def check_lemma_3_1_gram(x, y, z, t: float, tol: float = DEFAULT_TOL) -> CheckReport:
    """Block Gram positivity: margin is -lambda_min / (1 + ||x + y||_op)."""
    x, y = _operands(x, y)
    t = check_t(t, 0.5)
    z = _general(z, x.model)
    worst = -math.inf
    for a, b, c in zip(x.blocks, y.blocks, z.blocks):
        g = block_gram(a, b, c, t)
        lam_min = float(np.linalg.eigvalsh(g)[0])
        scale = 1.0 + float(np.linalg.norm(a.data + b.data, 2))
        worst = max(worst, -lam_min / scale)
    fp = fingerprint(x, y, z, t)
    return CheckReport("lem_3_1_gram", fp, worst <= tol, worst, "lambda_min", tol, t)


def check_lemma_3_6(x, y, tol: float = DEFAULT_TOL) -> CheckReport:
    x, y = _operands(x, y)
    ds = BlockOperator(
        x.model.doubled(),
        tuple(direct_sum(a.data, b.data) for a, b in zip(x.blocks, y.blocks)),
    )
    # mu(x + y) is zero-extended to the doubled width by submajorizes
    return _submaj_report("lem_3_6", mu_of(ds), mu_of(_sum(x, y)), tol, fingerprint(x, y))


def check_lemma_3_8_1(x, y, p: float, tol: float = DEFAULT_TOL, model: AlgebraModel | None = None
                      ) -> CheckReport:
    if not p > 0:
        raise InvalidInputError("p must be positive")
    if model is None:
        model = x.model if isinstance(x, BlockOperator) else AlgebraModel.unweighted(np.shape(x)[0])
    x, y = _general(x, model), _general(y, model)
    xy = _blockwise(lambda a, b: a @ b, model, x.blocks, y.blocks)
    for blk in xy.blocks:
        if not is_hermitian(blk):
            raise InvalidInputError("precondition violated: xy is not self-adjoint")
    yx = _blockwise(lambda a, b: b @ a, model, x.blocks, y.blocks)
    power = lambda v: v ** p  # noqa: E731
    g = spectrum_apply(mu_of(xy), power)
    f = spectrum_apply(mu_of(yx), power)
    return _submaj_report("lem_3_8_1", g, f, tol, fingerprint(x, y, p), notes=f"p={p:g}")


def check_lemma_3_8_2(x, y, r: float, tol: float = DEFAULT_TOL) -> CheckReport:
    if r < 1:
        raise RangeError(f"r must be >= 1, got {r}")
    x, y = _operands(x, y)

    g = mu_of(_blockwise(lambda a, b: abs_power(a.data @ b.data, r), x.model, x.blocks, y.blocks))
    f = mu_of(_blockwise(lambda a, b: a.power(r) @ b.power(r), x.model, x.blocks, y.blocks))
    return _submaj_report("lem_3_8_2", g, f, tol, fingerprint(x, y, r), notes=f"r={r:g}")


def _abs_power_spectrum(op: BlockOperator, m: float) -> SingularSpectrum:
    return mu_of(op.map(lambda a: abs_power(a, m)))


def _pow_or_id(a: PsdMatrix, p: float):
    return None if p == 0.0 else a.power(p)


def _mul(*factors):
    out = None
    for f in factors:
        if f is not None:
            out = f if out is None else out @ f
    return out


def check_lemma_3_2(x, y, z, t: float, m: float, tol: float = DEFAULT_TOL) -> list[CheckReport]:
    """Hoelder and interpolation bounds per norm; the Heinz chain by submajorization."""
    if not m > 1:
        raise InvalidInputError(f"Hoelder exponent must exceed 1, got {m}")
    n = m / (m - 1.0)
    x, y = _operands(x, y)
    t = check_t(t)
    z = _general(z, x.model)
    model = x.model
    fp = fingerprint(x, y, z, t, m)

    # Hoelder on a = xz, b = zy
    a = _blockwise(lambda p, c: p.data @ c, model, x.blocks, z.blocks)
    b = _blockwise(lambda c, q: c @ q.data, model, z.blocks, y.blocks)
    ab = mu_of(_blockwise(lambda u, v: u @ v, model, a.blocks, b.blocks))
    am, bn = _abs_power_spectrum(a, m), _abs_power_spectrum(b, n)
    rows = [
        (str(spec), norm_value(ab, spec),
         norm_value(am, spec) ** (1.0 / m) * norm_value(bn, spec) ** (1.0 / n))
        for spec in _spectra_grid(ab, am, bn)
    ]
    holder = _per_norm_report("lem_3_2_holder", rows, tol, fp, t, f"m={m:g} n={n:g}")

    # Heinz chain
    geo = mu_of(_blockwise(lambda p, c, q: p.power(0.5) @ c @ q.power(0.5),
                           model, x.blocks, z.blocks, y.blocks))
    mid = mu_of(_blockwise(
        lambda p, c, q: _mul(_pow_or_id(p, t), c, _pow_or_id(q, 1 - t))
        + _mul(_pow_or_id(p, 1 - t), c, _pow_or_id(q, t)),
        model, x.blocks, z.blocks, y.blocks))
    ari = mu_of(_blockwise(lambda p, c, q: p.data @ c + c @ q.data, model, x.blocks, z.blocks, y.blocks))
    left = _submaj_report("lem_3_2_heinz", scale_spectrum(geo, 2.0) if geo.values.size else geo,
                          mid, tol, fp, t)
    right = _submaj_report("lem_3_2_heinz", mid, ari, tol, fp, t)
    heinz = left if left.worst_margin >= right.worst_margin else right
    heinz.notes = "chain: " + ("left" if heinz is left else "right")

    # interpolation
    single = mu_of(_blockwise(lambda p, c, q: _mul(_pow_or_id(p, t), c, _pow_or_id(q, 1 - t)),
                              model, x.blocks, z.blocks, y.blocks))
    xz, zy = mu_of(a), mu_of(b)
    rows = [
        (str(spec), norm_value(single, spec),
         norm_value(xz, spec) ** t * norm_value(zy, spec) ** (1.0 - t))
        for spec in _spectra_grid(single, xz, zy)
    ]
    interp = _per_norm_report("lem_3_2_heinz", rows, tol, fp, t, "interpolation")
    return [holder, heinz, interp]


@dataclass
class Lemma21Instance:
    """Inputs for the elementary mu properties: PSD x, y; general g, h, a, b."""

    x: BlockOperator
    y: BlockOperator
    g: BlockOperator
    h: BlockOperator
    a: BlockOperator
    b: BlockOperator
    alpha: complex = -2.0
    powers: tuple[float, ...] = (0.5, 2.0)

    @classmethod
    def random(cls, model: AlgebraModel, rng: np.random.Generator, law: str = "uniform"):
        alpha = complex(rng.standard_normal(), rng.standard_normal())
        return cls(
            random_block_psd(model, law, rng), random_block_psd(model, law, rng),
            random_block(model, rng), random_block(model, rng),
            random_block(model, rng), random_block(model, rng), alpha,
        )


def _op_norm(op: BlockOperator) -> float:
    return max(float(np.linalg.norm(b, 2)) for b in op.blocks)


ITEM5_FUNCTIONS = (("t", lambda v: v), ("t^2", lambda v: v ** 2), ("exp", np.exp))
ITEM6_FUNCTIONS = (("t", lambda v: v), ("t^2", lambda v: v ** 2), ("sqrt", np.sqrt))


def _worst_submaj(check_id, pairs, tol, fp, notes) -> CheckReport:
    reports = []
    for label, g, f in pairs:
        r = _submaj_report(check_id, g, f, tol, fp, notes=f"{notes} f={label}")
        reports.append(r)
    return max(reports, key=lambda r: r.worst_margin)


def check_lemma_2_1_suite(instances: Iterable[Lemma21Instance], tol: float = DEFAULT_TOL
                          ) -> list[CheckReport]:
    reports = []
    cid = "lem_2_1_props"
    for inst in instances:
        model = inst.x.model
        fp = fingerprint(inst.x, inst.y, inst.g, inst.h, inst.a, inst.b, inst.alpha)
        g, h = inst.g, inst.h
        mg = mu_of(g)
        gnorm = _op_norm(g)

        # (1)
        absg = g.map(lambda m: abs_power(m, 1.0))
        alpha = inst.alpha
        pairs = [("|x|", mu_of(absg), mg), ("x*", mu_of(g.adjoint()), mg)]
        if alpha != 0:
            pairs.append(("alpha x", mu_of(g.map(lambda m: alpha * m)), scale_spectrum(mg, abs(alpha))))
        reports.append(_equality_report(cid, pairs, tol, fp, 1.0 + gnorm * max(1.0, abs(alpha)),
                                        "item (1)"))

        # (2) power functions and the trace identity
        xs = [PsdMatrix(b) for b in inst.x.blocks]
        # mu(x) of a PSD operator from its clamped eigenvalues, the spectrum
        # the functional calculus acts on
        mx = SingularSpectrum.from_pairs(
            np.concatenate([m.eigenvalues for m in xs]),
            np.concatenate([np.full(m.n, w) for m, w in zip(xs, model.weights)]),
        )
        pairs, worst_trace = [], 0.0
        for p in inst.powers:
            xp = BlockOperator(model, tuple(m.power(p) for m in xs))
            pairs.append((f"t^{p:g}", mu_of(xp), spectrum_apply(mx, lambda v: v ** p)))
            tau = sum(w * float(np.real(np.trace(b))) for w, b in zip(model.weights, xp.blocks))
            integral = float(np.sum(mx.values ** p * mx.widths))
            worst_trace = max(worst_trace, abs(tau - integral) / (1.0 + abs(integral)))
        rep = _equality_report(cid, pairs, tol, fp, 1.0 + max(_op_norm(inst.x), 1.0) ** 2, "item (2)")
        if worst_trace > rep.worst_margin:
            rep.worst_margin, rep.worst_location = worst_trace, "trace identity"
            rep.holds = worst_trace <= tol
        reports.append(rep)

        # (3) 0 <= x <= x + y
        big = _blockwise(lambda p, q: p + q, model, inst.x.blocks, inst.y.blocks)
        excess = pointwise_excess(mx, mu_of(big)) / (1.0 + _op_norm(big))
        reports.append(CheckReport(cid, fp, excess <= tol, excess, "pointwise", tol, None, True,
                                   "item (3)"))

        # (4) mu(a g b) <= ||a|| ||b|| mu(g)
        c = _op_norm(inst.a) * _op_norm(inst.b)
        agb = mu_of(_blockwise(lambda p, m, q: p @ m @ q, model, inst.a.blocks, g.blocks, inst.b.blocks))
        bound = scale_spectrum(mg, c) if c > 0 else mg
        excess = pointwise_excess(agb, bound) / (1.0 + c * gnorm)
        reports.append(CheckReport(cid, fp, excess <= tol, excess, "pointwise", tol, None, True,
                                   "item (4)"))

        # (5) sums, convex increasing f
        mh = mu_of(h)
        msum = mu_of(_blockwise(lambda p, q: p + q, model, g.blocks, h.blocks))
        dominant = spectrum_sum(mg, mh)
        pairs = [(label, spectrum_apply(msum, fn), spectrum_apply(dominant, fn))
                 for label, fn in ITEM5_FUNCTIONS]
        reports.append(_worst_submaj(cid, pairs, tol, fp, "item (5)"))

        # (6) products, f(e^s) convex increasing
        mprod = mu_of(_blockwise(lambda p, q: p @ q, model, g.blocks, h.blocks))
        dominant = spectrum_product(mg, mh)
        pairs = [(label, spectrum_apply(mprod, fn), spectrum_apply(dominant, fn))
                 for label, fn in ITEM6_FUNCTIONS]
        reports.append(_worst_submaj(cid, pairs, tol, fp, "item (6)"))
    return reports


def self_adjoint_product_pair(model: AlgebraModel, rng: np.random.Generator, kind: int):
    """Pairs with xy self-adjoint: (x, x*) or (u h, h u*)."""
    xs, ys = [], []
    for n in model.sizes:
        if kind % 2 == 0:
            a = complex_gaussian(n, rng)
            xs.append(a)
            ys.append(a.conj().T.copy())
        else:
            u, hm = haar_unitary(n, rng), random_hermitian(n, rng)
            xs.append(u @ hm)
            ys.append(hm @ u.conj().T)
    return BlockOperator(model, tuple(xs)), BlockOperator(model, tuple(ys))


# -- suite runner ----------------------------------------------------------------

PROVED_T_GRID = tuple([k / 40 for k in range(0, 10)] + [k / 40 for k in range(30, 41)])
FT_GRID = tuple(0.75 + k / 40 for k in range(11))
CONST_GRID = tuple(k / 20 for k in range(21))
HALF_GRID = (0.5, 0.6, 0.75, 0.9, 1.0)
PQ_PAIRS = ((3.0, 1.0), (1.0, 3.0), (4.0, 1.0), (1.0, 0.0), (1.0, 1.0))
HOLDER_EXPONENTS = (1.5, 2.0, 3.0)
LEMMA_3_8_1_POWERS = (0.5, 1.0, 2.0)
LEMMA_3_8_2_POWERS = (1.0, 1.5, 2.0, 3.0)

SUITE_ORDER = (
    "bourin_t", "thm_ft", "constants", "bourin_pq", "thm_cauchy_schwarz_Bt", "cor_bt_ft",
    "lem_3_1_gram", "lem_3_6", "lem_3_8_1", "lem_3_8_2", "lem_3_2", "lem_2_1_props",
)


@dataclass
class SuiteConfig:
    seed: int = 42
    dims: tuple[int, ...] = tuple(range(2, 9))
    trials: int = 1000
    t_grid: tuple[float, ...] = PROVED_T_GRID
    ft_grid: tuple[float, ...] = FT_GRID
    const_grid: tuple[float, ...] = CONST_GRID
    half_grid: tuple[float, ...] = HALF_GRID
    tol: float = DEFAULT_TOL
    model: AlgebraModel | None = None
    law: str = "mixed"
    checks: tuple[str, ...] = SUITE_ORDER

    def validate(self) -> None:
        if self.trials < 0:
            raise InvalidInputError("trials must be >= 0")
        if not self.tol > 0:
            raise InvalidInputError("tolerance must be positive")
        if self.model is None and (not self.dims or min(self.dims) < 1):
            raise InvalidInputError("dims must be positive integers")
        for t in (*self.t_grid, *self.const_grid):
            check_t(t)
        for t in self.ft_grid:
            if not 0.75 <= t <= 1:
                raise InvalidInputError("ft grid must lie in [3/4, 1]")
        for t in self.half_grid:
            check_t(t, 0.5)
        if self.law != "mixed" and self.law not in SPECTRUM_LAWS:
            raise InvalidInputError(f"unknown spectrum law {self.law!r}")
        unknown = set(self.checks) - set(SUITE_ORDER)
        if unknown:
            raise InvalidInputError(f"unknown suite checks {sorted(unknown)}")

    def models(self) -> list[AlgebraModel]:
        if self.model is not None:
            return [self.model]
        return [AlgebraModel.unweighted(n) for n in self.dims]

    def law_for(self, trial: int) -> str:
        return SPECTRUM_LAWS[trial % len(SPECTRUM_LAWS)] if self.law == "mixed" else self.law


def instance_rng(seed: int, model_index: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, model_index, trial])


def run_instance(config: SuiteConfig, model: AlgebraModel, rng: np.random.Generator,
                 trial: int) -> dict[str, list[CheckReport]]:
    """All configured checks on one random instance, bucketed by suite entry."""
    law = config.law_for(trial)
    tol = config.tol
    x = PsdOperator.from_any(random_block_psd(model, law, rng))
    y = PsdOperator.from_any(random_block_psd(model, law, rng))
    z = random_block(model, rng)
    out: dict[str, list[CheckReport]] = defaultdict(list)
    checks = set(config.checks)
    if "bourin_t" in checks:
        out["bourin_t"] = [check_bourin_t(x, y, t, tol) for t in config.t_grid]
    if "thm_ft" in checks:
        out["thm_ft"] = [check_ft(x, y, t, tol) for t in config.ft_grid]
    if "constants" in checks:
        for t in config.const_grid:
            out["constants"].extend(check_constant_bounds(x, y, t, tol))
    if "bourin_pq" in checks:
        out["bourin_pq"] = [check_bourin_pq(x, y, p, q, tol) for p, q in PQ_PAIRS]
    if "thm_cauchy_schwarz_Bt" in checks:
        out["thm_cauchy_schwarz_Bt"] = [
            check_thm_cauchy_schwarz_Bt(x, y, z, t, tol=tol) for t in config.half_grid]
    if "cor_bt_ft" in checks:
        out["cor_bt_ft"] = [check_cor_bt_ft(x, y, t, tol=tol) for t in config.half_grid]
    if "lem_3_1_gram" in checks:
        out["lem_3_1_gram"] = [check_lemma_3_1_gram(x, y, z, t, tol) for t in config.half_grid]
    if "lem_3_6" in checks:
        out["lem_3_6"] = [check_lemma_3_6(x, y, tol)]
    if "lem_3_8_1" in checks:
        g, h = self_adjoint_product_pair(model, rng, trial)
        out["lem_3_8_1"] = [check_lemma_3_8_1(g, h, p, tol, model) for p in LEMMA_3_8_1_POWERS]
    if "lem_3_8_2" in checks:
        out["lem_3_8_2"] = [check_lemma_3_8_2(x, y, r, tol) for r in LEMMA_3_8_2_POWERS]
    if "lem_3_2" in checks:
        t = float(rng.uniform(0.0, 1.0))
        m = HOLDER_EXPONENTS[trial % len(HOLDER_EXPONENTS)]
        out["lem_3_2"] = check_lemma_3_2(x, y, z, t, m, tol)
    if "lem_2_1_props" in checks:
        out["lem_2_1_props"] = check_lemma_2_1_suite([Lemma21Instance.random(model, rng, law)], tol)
    return out


def run_suite(config: SuiteConfig) -> list[CheckReport]:
    """Deterministic in ``config.seed``; ordered by (check, model, trial)."""
    config.validate()
    buckets: dict[str, list[CheckReport]] = defaultdict(list)
    for mi, model in enumerate(config.models()):
        for trial in range(config.trials):
            rng = instance_rng(config.seed, mi, trial)
            for key, reports in run_instance(config, model, rng, trial).items():
                buckets[key].extend(reports)
    return [r for key in SUITE_ORDER for r in buckets.get(key, [])]


@dataclass
class SummaryRow:
    check_id: str
    trials: int = 0
    failures: int = 0
    max_margin: float = field(default=-math.inf)


def summarize(reports: Iterable[CheckReport]) -> list[SummaryRow]:
    """Per check id; open-range reports are tallied under ``<id>:open``."""
    rows: dict[str, SummaryRow] = {}
    for r in reports:
        key = r.check_id if r.proved else f"{r.check_id}:open"
        row = rows.setdefault(key, SummaryRow(key))
        row.trials += 1
        row.failures += 0 if r.holds else 1
        row.max_margin = max(row.max_margin, r.worst_margin)
    return list(rows.values())


def proved_failures(reports: Iterable[CheckReport]) -> list[CheckReport]:
    return [r for r in reports if r.proved and not r.holds]


def exit_code(reports: Sequence[CheckReport]) -> int:
    return 1 if proved_failures(reports) else 0
