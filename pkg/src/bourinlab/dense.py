"""Dense complex matrix kernels and spectral calculus on PSD matrices.

Matrices are plain ``numpy`` complex128 arrays; this module validates them
and provides the eigensolvers and fractional powers the rest of the package
is built on.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITIAN_RTOL = 1e-12
PSD_CLAMP_RTOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 100

_EPS = np.finfo(float).eps


class InvalidInputError(ValueError):
    """Raised for malformed matrices, exponents or parameters."""


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # non-increasing, real
    vectors: np.ndarray  # columns matched to eigenvalues


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite square complex128 array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def hermitian_defect(a: np.ndarray) -> float:
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - a.conj().T)))


def is_hermitian(a: np.ndarray) -> bool:
    a = np.asarray(a)
    if a.size == 0:
        return True
    scale = 1.0 + float(np.max(np.abs(a)))
    return hermitian_defect(a) <= HERMITIAN_RTOL * scale


def as_hermitian(a, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, name)
    if not is_hermitian(arr):
        raise InvalidInputError(
            f"{name} is not Hermitian (defect {hermitian_defect(arr):.3e})"
        )
    return arr


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise InvalidInputError(f"dimension mismatch: {a.shape} vs {b.shape}")


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_shape(a, b)
    return a @ b


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T.copy()


def add(a, b) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    _check_same_shape(a, b)
    return a + b


def scale(a, c: complex) -> np.ndarray:
    return complex(c) * as_matrix(a)


def _sort_descending(w: np.ndarray, v: np.ndarray) -> EigenDecomposition:
    # stable: equal eigenvalues keep their original diagonal order
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(w[order].copy(), v[:, order].copy())


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint pivot pairs covering every (p, q) once per sweep."""
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            i, j = players[k], players[m - 1 - k]
            if i < n and j < n:
                ps.append(min(i, j))
                qs.append(max(i, j))
        rounds.append((np.array(ps, dtype=int), np.array(qs, dtype=int)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(
    h, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> EigenDecomposition:
    """Cyclic complex Jacobi eigensolver for a Hermitian matrix.

    Each sweep visits every off-diagonal pivot once, in round-robin order so
    that the rotations inside one round act on disjoint index pairs and can be
    applied together. Iteration stops once the off-diagonal Frobenius mass
    drops below ``tol * ||h||_F`` or stops decreasing.
    """
    a = as_hermitian(h)
    n = a.shape[0]
    if n == 0:
        raise InvalidInputError("dimension 0")
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=np.complex128)
    norm = np.linalg.norm(a)
    rounds = _round_robin(n)
    mask = ~np.eye(n, dtype=bool)

    def off(m):
        return np.linalg.norm(m[mask])

    prev = np.inf
    for _ in range(max_sweeps):
        current = off(a)
        if current <= tol * norm or current >= prev:
            break
        prev = current
        for ps, qs in rounds:
            if ps.size == 0:
                continue
            apq = a[ps, qs]
            mag = np.abs(apq)
            live = mag > 0.0
            if not np.any(live):
                continue
            ps, qs, apq, mag = ps[live], qs[live], apq[live], mag[live]
            phase = apq / mag
            app = a[ps, ps].real
            aqq = a[qs, qs].real
            # real symmetric rotation on the phase-corrected pivot block
            theta = 0.5 * np.arctan2(2.0 * mag, aqq - app)
            c, s = np.cos(theta), np.sin(theta)
            g = np.eye(n, dtype=np.complex128)
            g[ps, ps] = c
            g[qs, qs] = c
            g[ps, qs] = s * phase
            g[qs, ps] = -s * np.conj(phase)
            a = g.conj().T @ a @ g
            a = 0.5 * (a + a.conj().T)
            a[ps, qs] = 0.0
            a[qs, ps] = 0.0
            v = v @ g
    return _sort_descending(np.real(np.diag(a)).copy(), v)


def hermitian_eig(h, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition with eigenvalues sorted non-increasing.

    ``method="lapack"`` uses ``numpy.linalg.eigh``; ``method="jacobi"`` uses
    :func:`jacobi_eigh`. Both return the same contract.
    """
    if method == "jacobi":
        return jacobi_eigh(h)
    if method != "lapack":
        raise InvalidInputError(f"unknown eigensolver {method!r}")
    a = as_hermitian(h)
    if a.shape[0] == 0:
        raise InvalidInputError("dimension 0")
    w, v = np.linalg.eigh(a)
    # eigh returns ascending order; reverse while keeping ties stable
    return _sort_descending(w, v)


def singular_values(a) -> np.ndarray:
    """Singular values, non-increasing."""
    arr = as_matrix(a)
    if arr.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.svd(arr, compute_uv=False)


def abs_power(a, r: float) -> np.ndarray:
    """|a|^r = (a* a)^{r/2}, built from an SVD so small singular values stay accurate."""
    arr = as_matrix(a)
    _, s, vh = np.linalg.svd(arr)
    out = (vh.conj().T * s ** float(r)) @ vh
    return 0.5 * (out + out.conj().T)


def operator_norm(a) -> float:
    s = singular_values(a)
    return float(s[0]) if s.size else 0.0


class PsdMatrix:
    """A positive semidefinite matrix with a cached eigendecomposition.

    Eigenvalues within ``PSD_CLAMP_RTOL * (1 + lambda_max)`` below zero are
    clamped to zero; anything more negative is rejected. Eigenvalues below the
    floating-point noise floor ``10 * n * eps * lambda_max`` are treated as
    exact zeros, which fixes the kernel used by support projections and keeps
    small fractional powers of rank-deficient matrices from amplifying noise.

    Powers are memoised per exponent, so one instance can serve many
    expressions at the same exponent.
    """

    __slots__ = ("data", "eigenvalues", "vectors", "_powers")

    def __init__(self, a, method: str = "lapack", name: str = "matrix"):
        self.data = as_hermitian(a, name)
        n = self.data.shape[0]
        if n == 0:
            raise InvalidInputError(f"{name} has dimension 0")
        w, v = hermitian_eig(self.data, method=method)
        top = max(float(w[0]), 0.0)
        floor = -PSD_CLAMP_RTOL * (1.0 + top)
        if w[-1] < floor:
            raise InvalidInputError(
                f"{name} is not positive semidefinite: eigenvalue {w[-1]:.6e}"
            )
        w = np.where(w <= 10.0 * n * _EPS * top, 0.0, w)
        self.eigenvalues = w
        self.vectors = v
        self._powers: dict[float, np.ndarray] = {}

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])

    def support(self) -> np.ndarray:
        return self.power(0.0)

    def power(self, p: float) -> np.ndarray:
        p = float(p)
        if np.isnan(p):
            raise InvalidInputError("NaN exponent")
        if p == 1.0:
            return self.data
        cached = self._powers.get(p)
        if cached is not None:
            return cached
        w = self.eigenvalues
        pos = w > 0.0
        mapped = np.zeros_like(w)
        if p == 0.0:
            mapped[pos] = 1.0
        else:
            mapped[pos] = w[pos] ** p
        r = (self.vectors * mapped) @ self.vectors.conj().T
        r = 0.5 * (r + r.conj().T)
        self._powers[p] = r
        return r

    def reconstruction_residual(self) -> float:
        q, lam = self.vectors, self.eigenvalues
        return float(np.linalg.norm((q * lam) @ q.conj().T - self.data))

    def __repr__(self) -> str:
        return f"PsdMatrix(n={self.n}, lambda_max={self.lambda_max:.4g})"


def as_psd(x, name: str = "matrix") -> PsdMatrix:
    return x if isinstance(x, PsdMatrix) else PsdMatrix(x, name=name)


def psd_power(x, p: float) -> np.ndarray:
    """Spectral power of a PSD matrix.

    Zero eigenvalues map to zero for every exponent, so ``p == 0`` gives the
    support projection s(x) rather than the identity, and negative ``p`` is
    the Moore-Penrose power on the support.
    """
    return as_psd(x).power(p)
