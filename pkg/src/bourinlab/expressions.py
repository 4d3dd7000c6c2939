"""The composite expressions built from a PSD pair (x, y) and an operator z.

    b_t = x^t y^{1-t} + y^t x^{1-t}
    B_t = x^t z y^{1-t} + y^t z* x^{1-t}
    f_t = y^{1-t} x^{2t-1} y^{1-t} + x^{1-t} y^{2t-1} x^{1-t}        (t >= 1/2)
    F_t = y^{1-t} z* x^{2t-1} z y^{1-t} + x^{1-t} z y^{2t-1} z* x^{1-t}

Zero-exponent conventions: a factor whose exponent is ``t`` or ``1 - t`` and
vanishes (the endpoints t = 0, 1) is the identity, so b_1 = x + y and
f_1 = x + y exactly. The ``2t - 1`` factor of f/F at t = 1/2 is the support
projection s(x), matching :func:`psd_power`.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .dense import InvalidInputError, PsdMatrix, as_matrix, as_psd

PINV_RTOL = 1e-12


class RangeError(InvalidInputError):
    """Exponent outside the range where an expression or claim is defined."""


def check_t(t: float, lower: float = 0.0) -> float:
    t = float(t)
    if not (lower <= t <= 1.0):
        raise RangeError(f"t={t} outside [{lower}, 1]")
    return t


def _pair(x, y) -> tuple[PsdMatrix, PsdMatrix]:
    x, y = as_psd(x, "x"), as_psd(y, "y")
    if x.n != y.n:
        raise InvalidInputError(f"dimension mismatch: {x.n} vs {y.n}")
    return x, y


def _factor(x: PsdMatrix, p: float):
    """x^p, or None (identity) for a vanishing endpoint exponent."""
    return None if p == 0.0 else x.power(p)


def _prod(*factors) -> np.ndarray:
    out = None
    for f in factors:
        if f is None:
            continue
        out = f if out is None else out @ f
    return out


def _normalize_z(z, n: int):
    if z is None:
        return None
    z = as_matrix(z, "z")
    if z.shape != (n, n):
        raise InvalidInputError(f"z has shape {z.shape}, expected ({n}, {n})")
    if np.array_equal(z, np.eye(n)):
        return None
    return z


def b_expr_z(x, y, z, t: float) -> np.ndarray:
    """B_t; ``z=None`` (or the identity) gives b_t."""
    x, y = _pair(x, y)
    t = check_t(t)
    z = _normalize_z(z, x.n)
    zs = None if z is None else z.conj().T
    if z is None and t in (0.0, 1.0):
        return x.data + y.data if t == 1.0 else y.data + x.data
    first = _prod(_factor(x, t), z, _factor(y, 1.0 - t))
    second = _prod(_factor(y, t), zs, _factor(x, 1.0 - t))
    return first + second


def b_expr(x, y, t: float) -> np.ndarray:
    return b_expr_z(x, y, None, t)


def f_expr_z(x, y, z, t: float) -> np.ndarray:
    """F_t for t in [1/2, 1]; ``z=None`` (or the identity) gives f_t."""
    x, y = _pair(x, y)
    t = check_t(t, 0.5)
    z = _normalize_z(z, x.n)
    if z is None and t == 1.0:
        return x.data + y.data
    zs = None if z is None else z.conj().T
    ys, xs = _factor(y, 1.0 - t), _factor(x, 1.0 - t)
    # 2t-1 = 0 at t = 1/2: support projection, never the identity
    mid_x, mid_y = x.power(2.0 * t - 1.0), y.power(2.0 * t - 1.0)
    first = _prod(ys, zs, mid_x, z, ys)
    second = _prod(xs, z, mid_y, zs, xs)
    out = first + second
    return 0.5 * (out + out.conj().T)


def f_expr(x, y, t: float) -> np.ndarray:
    return f_expr_z(x, y, None, t)


def half_convention_gap(x, y) -> float:
    """Frobenius distance between f_{1/2} under the support convention and
    under x^0 = I (which gives x + y). Nonzero only for singular inputs."""
    x, y = _pair(x, y)
    return float(np.linalg.norm(f_expr(x, y, 0.5) - (x.data + y.data)))


def block_gram(x, y, z, t: float) -> np.ndarray:
    """[[x+y, B_t], [B_t*, F_t]] of dimension 2n."""
    x, y = _pair(x, y)
    t = check_t(t, 0.5)
    if z is None:
        z = np.eye(x.n)
    big = b_expr_z(x, y, z, t)
    out = np.block([[x.data + y.data, big], [big.conj().T, f_expr_z(x, y, z, t)]])
    return 0.5 * (out + out.conj().T)


def gram_factor(x, y, z, t: float) -> np.ndarray:
    """T with T T* = block_gram(x, y, z, t)."""
    x, y = _pair(x, y)
    t = check_t(t, 0.5)
    z = np.eye(x.n) if z is None else as_matrix(z, "z")
    h = (2.0 * t - 1.0) / 2.0
    row2_left = _prod(_factor(y, 1.0 - t), z.conj().T, x.power(h))
    row2_right = _prod(_factor(x, 1.0 - t), z, y.power(h))
    return np.block([[x.power(0.5), y.power(0.5)], [row2_left, row2_right]])


def _pinv_sqrt(a: PsdMatrix) -> np.ndarray:
    w = a.eigenvalues
    keep = w > PINV_RTOL * max(float(w[0]), 0.0)
    inv = np.zeros_like(w)
    inv[keep] = 1.0 / np.sqrt(w[keep])
    return (a.vectors * inv) @ a.vectors.conj().T


class Contraction(NamedTuple):
    c: np.ndarray
    residual: float  # Frobenius norm of (x+y)^{1/2} c F^{1/2} - B
    norm: float  # operator norm of c


def contraction_factor(x, y, z, t: float) -> Contraction:
    """Minimal-norm c with B_t = (x+y)^{1/2} c F_t^{1/2}, via pseudo-inverses."""
    x, y = _pair(x, y)
    t = check_t(t, 0.5)
    if z is None:
        z = np.eye(x.n)
    big = b_expr_z(x, y, z, t)
    s = PsdMatrix(x.data + y.data, name="x+y")
    f = PsdMatrix(f_expr_z(x, y, z, t), name="F_t")
    c = _pinv_sqrt(s) @ big @ _pinv_sqrt(f)
    rebuilt = s.power(0.5) @ c @ f.power(0.5)
    residual = float(np.linalg.norm(rebuilt - big))
    norm = float(np.linalg.norm(c, 2)) if c.size else 0.0
    return Contraction(c, residual, norm)


def contraction_residual(x, y, z, t: float) -> float:
    fac = contraction_factor(x, y, z, t)
    return max(fac.residual, fac.norm - 1.0, 0.0)


def direct_sum(x, y) -> np.ndarray:
    x, y = (np.asarray(a, dtype=np.complex128) for a in (x, y))
    x = x.reshape(0, 0) if x.size == 0 else x
    y = y.reshape(0, 0) if y.size == 0 else y
    n, m = x.shape[0], y.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.complex128)
    out[:n, :n] = x
    out[n:, n:] = y
    return out


class PqPair(NamedTuple):
    lhs: np.ndarray
    rhs: np.ndarray


def bourin_pq_pair(a, b, p: float, q: float) -> PqPair:
    """Both sides of a^p b^q + b^p a^q <= a^{p+q} + b^{p+q}."""
    p, q = float(p), float(q)
    if p < 0 or q < 0 or not p + q > 0:
        raise InvalidInputError("need p, q >= 0 and p + q > 0")
    a, b = _pair(a, b)
    lhs = _prod(_factor(a, p), _factor(b, q)) + _prod(_factor(b, p), _factor(a, q))
    return PqPair(lhs, a.power(p + q) + b.power(p + q))
