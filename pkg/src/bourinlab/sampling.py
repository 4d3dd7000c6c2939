"""Random matrix generators used by the suite runner and the search."""
from __future__ import annotations

import numpy as np

from .dense import InvalidInputError, PsdMatrix
from .spectrum import AlgebraModel, BlockOperator

SPECTRUM_LAWS = ("uniform", "exponential", "two-point", "condition")
CONDITION_DECADES = 6.0


def draw_spectrum(n: int, law: str, rng: np.random.Generator) -> np.ndarray:
    if law == "uniform":
        return rng.uniform(0.0, 1.0, n)
    if law == "exponential":
        return rng.exponential(1.0, n)
    if law == "two-point":
        return rng.integers(0, 2, n).astype(float)
    if law == "condition":
        # log-spaced spectrum with a random condition number up to 1e6
        decades = rng.uniform(0.0, CONDITION_DECADES)
        return np.logspace(0.0, -decades, n) if n > 1 else np.ones(1)
    raise InvalidInputError(f"unknown spectrum law {law!r}")


def law_mean(law: str, samples: int = 200_000, seed: int = 0) -> float:
    """Mean eigenvalue of a law, by Monte Carlo on the scalar draws."""
    rng = np.random.default_rng(seed)
    if law == "condition":
        # spectrum is not iid; average over whole dimension-4 draws
        return float(np.mean([draw_spectrum(4, law, rng).mean() for _ in range(samples // 10)]))
    return float(np.mean(draw_spectrum(samples, law, rng)))


def complex_gaussian(n: int, rng: np.random.Generator, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2.0)


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(complex_gaussian(n, rng))
    d = np.diag(r)
    phases = np.where(np.abs(d) > 0, d / np.abs(d), 1.0)
    return q * phases


def psd_from_spectrum(eigenvalues, u: np.ndarray) -> np.ndarray:
    m = (u * np.asarray(eigenvalues, dtype=float)) @ u.conj().T
    return 0.5 * (m + m.conj().T)


def random_psd_array(n: int, law: str, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise InvalidInputError("dimension must be >= 1")
    return psd_from_spectrum(draw_spectrum(n, law, rng), haar_unitary(n, rng))


def random_psd(n: int, law: str, rng: np.random.Generator) -> PsdMatrix:
    return PsdMatrix(random_psd_array(n, law, rng))


def random_block_psd(model: AlgebraModel, law: str, rng) -> BlockOperator:
    return BlockOperator(model, tuple(random_psd_array(n, law, rng) for n in model.sizes))


def random_block(model: AlgebraModel, rng, scale: float = 1.0) -> BlockOperator:
    return BlockOperator(model, tuple(scale * complex_gaussian(n, rng) for n in model.sizes))


def random_hermitian(n: int, rng) -> np.ndarray:
    g = complex_gaussian(n, rng)
    return 0.5 * (g + g.conj().T)
