"""Randomized hill climbing for large margins of the main inequality.

The objective is the relative submajorization margin of b_t against x + y.
On [0, 1/4] u [3/4, 1] the inequality is proved, so a positive margin there
is a bug; inside (1/4, 3/4) a positive margin would be a counterexample and
is reported, never asserted.
"""
from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .dense import InvalidInputError, PsdMatrix
from .io import atomic_write_text, matrix_from_json, matrix_to_json
from .sampling import SPECTRUM_LAWS, complex_gaussian, draw_spectrum, haar_unitary, random_psd
from .spectrum import BlockOperator
from .verifier import PsdOperator, check_bourin_t, fingerprint

__all__ = [
    "SearchConfig", "SearchResult", "random_psd", "margin", "hill_climb", "sweep_t",
    "persist", "load", "LibraryBugError", "FingerprintMismatch",
]

log = logging.getLogger(__name__)

ANCHORS = (0.25, 0.5, 0.75)
ANCHOR_LIMIT = 1e-8
CANDIDATE_LIMIT = 1e-6
T_STEP = 0.01
T_MARGIN = 1e-6  # keeps jointly optimised t strictly inside (1/4, 3/4)
RELOAD_TOL = 1e-12


class LibraryBugError(RuntimeError):
    """A proved inequality came out violated: numerics or code are wrong."""


class FingerprintMismatch(InvalidInputError):
    pass


@dataclass
class SearchConfig:
    seed: int = 0
    dimension: int = 3
    restarts: int = 10
    steps_per_restart: int = 200
    t: float | None = 0.5  # None: optimise t jointly
    perturbation_scale: float = 0.1
    spectrum_law: str = "uniform"
    streak: int = 20
    anneal: float = 0.95
    workers: int = 1

    def validate(self) -> None:
        if self.dimension < 2:
            raise InvalidInputError("dimension must be >= 2")
        if self.restarts < 1 or self.steps_per_restart < 0:
            raise InvalidInputError("need restarts >= 1 and steps >= 0")
        if self.t is not None and not 0.25 <= self.t <= 0.75:
            raise InvalidInputError("fixed t must lie in [1/4, 3/4]")
        if self.perturbation_scale < 0:
            raise InvalidInputError("perturbation scale must be >= 0")
        if self.spectrum_law not in SPECTRUM_LAWS:
            raise InvalidInputError(f"unknown spectrum law {self.spectrum_law!r}")

    def to_json(self) -> dict:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    best_margin: float
    x: np.ndarray
    y: np.ndarray
    t: float
    seed_lineage: tuple[int, int, int]  # (seed, restart, step)
    margin_history: list[float] = field(default_factory=list)
    leaderboard: list[tuple[int, float]] = field(default_factory=list)

    @property
    def fingerprint(self) -> str:
        return instance_fingerprint(self.x, self.y, self.t)


def instance_fingerprint(x, y, t) -> str:
    return fingerprint(BlockOperator.single(x), BlockOperator.single(y), float(t))


def margin(x, y, t: float, exact: bool = False, method: str = "lapack") -> float:
    """Relative submajorization margin of b_t against x + y (<= 0 certifies)."""
    if method != "lapack":
        x = PsdOperator.from_any(PsdMatrix(np.asarray(x), method=method))
        y = PsdOperator.from_any(PsdMatrix(np.asarray(y), method=method))
    return check_bourin_t(x, y, t, exact=exact).worst_margin


def _gram(factor: np.ndarray) -> np.ndarray:
    m = factor @ factor.conj().T
    return 0.5 * (m + m.conj().T)


def _initial_factor(n: int, law: str, rng: np.random.Generator) -> np.ndarray:
    lam = draw_spectrum(n, law, rng)
    return haar_unitary(n, rng) * np.sqrt(lam)


class _Outcome(NamedTuple):
    restart: int
    best: float
    x: np.ndarray
    y: np.ndarray
    t: float
    step: int
    improvements: list[float]


def _run_restart(config: SearchConfig, restart: int) -> _Outcome:
    rng = np.random.default_rng([config.seed, restart])
    n = config.dimension
    lx = _initial_factor(n, config.spectrum_law, rng)
    ly = _initial_factor(n, config.spectrum_law, rng)
    joint = config.t is None
    t = float(rng.uniform(0.25 + T_MARGIN, 0.75 - T_MARGIN)) if joint else float(config.t)
    x, y = _gram(lx), _gram(ly)
    current = margin(x, y, t)
    best = (current, x, y, t, 0)
    improvements = [current]
    scale = config.perturbation_scale
    streak = 0
    for step in range(1, config.steps_per_restart + 1):
        dx = complex_gaussian(n, rng)
        dy = complex_gaussian(n, rng)
        dt = T_STEP * (1.0 if rng.random() < 0.5 else -1.0)
        if config.perturbation_scale == 0:
            continue
        cand_lx, cand_ly = lx + scale * dx, ly + scale * dy
        cand_t = float(np.clip(t + dt, 0.25 + T_MARGIN, 0.75 - T_MARGIN)) if joint else t
        cx, cy = _gram(cand_lx), _gram(cand_ly)
        m = margin(cx, cy, cand_t)
        if m > current:
            lx, ly, t, current = cand_lx, cand_ly, cand_t, m
            streak = 0
            if m > best[0]:
                best = (m, cx, cy, cand_t, step)
                improvements.append(m)
        else:
            streak += 1
            if streak >= config.streak:
                scale *= config.anneal
                streak = 0
    m, bx, by, bt, bstep = best
    return _Outcome(restart, m, bx, by, bt, bstep, improvements)


def _run_restart_star(args):
    return _run_restart(*args)


def hill_climb(config: SearchConfig, initial: SearchResult | None = None) -> SearchResult:
    """Best candidate over all restarts; deterministic in ``config``.

    Restarts are independent and merged in restart order, so running them on
    several workers gives the same result as running them serially.
    """
    config.validate()
    if initial is not None and config.t is not None and initial.t != config.t:
        raise InvalidInputError(f"resumed candidate has t={initial.t}, search fixes t={config.t}")
    jobs = [(config, r) for r in range(config.restarts)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            outcomes = list(pool.map(_run_restart_star, jobs))
    else:
        outcomes = [_run_restart(*job) for job in jobs]

    result = initial
    history = list(initial.margin_history[-1:]) if initial is not None else []
    leaderboard = []
    for out in outcomes:
        leaderboard.append((out.restart, out.best))
        if result is None or out.best > result.best_margin:
            base = result.best_margin if result is not None else -math.inf
            history.extend(m for m in out.improvements if m > base)
            result = SearchResult(
                out.best, out.x, out.y, out.t, (config.seed, out.restart, out.step)
            )
    # keep history strictly increasing after the merge
    history = [m for i, m in enumerate(history) if i == 0 or m > max(history[:i])]
    result.margin_history = history
    result.leaderboard = sorted(leaderboard, key=lambda item: (-item[1], item[0]))
    _anchor_guard(config, result)
    return result


def _anchor_guard(config: SearchConfig, result: SearchResult) -> None:
    if config.t is None or config.t not in ANCHORS or result.best_margin <= ANCHOR_LIMIT:
        return
    recomputed = margin(result.x, result.y, result.t, exact=True, method="jacobi")
    raise LibraryBugError(
        f"margin {result.best_margin:.3e} at proved point t={result.t} "
        f"(recomputed with Jacobi + compensated sums: {recomputed:.3e}); "
        f"lineage {result.seed_lineage}"
    )


class SweepRow(NamedTuple):
    t: float
    margin: float
    kyfan_worst_a: float


def sweep_t(x, y, grid) -> list[SweepRow]:
    x, y = PsdOperator.from_any(x, "x"), PsdOperator.from_any(y, "y")
    rows = []
    for t in grid:
        r = check_bourin_t(x, y, float(t))
        rows.append(SweepRow(float(t), r.worst_margin, float(r.worst_location)))
    return rows


def result_to_json(result: SearchResult) -> dict:
    obj = {
        "t": result.t,
        "best_margin": result.best_margin,
        "seed_lineage": list(result.seed_lineage),
        "margin_history": list(result.margin_history),
        "leaderboard": [list(item) for item in result.leaderboard],
        "x": matrix_to_json(result.x),
        "y": matrix_to_json(result.y),
        "fingerprint": result.fingerprint,
        "range": "proved" if result.t <= 0.25 or result.t >= 0.75 else "open",
    }
    if result.best_margin > CANDIDATE_LIMIT:
        obj["compensated_margin"] = margin(result.x, result.y, result.t, exact=True)
    return obj


def persist(result: SearchResult, path) -> None:
    text = json.dumps(result_to_json(result), indent=1, allow_nan=False)
    atomic_write_text(Path(path), text + "\n")


def load(path) -> SearchResult:
    """Read a candidate, check its fingerprint and recompute its margin."""
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read candidate {path}: {exc}") from exc
    x, y = matrix_from_json(obj["x"]), matrix_from_json(obj["y"])
    t = float(obj["t"])
    if instance_fingerprint(x, y, t) != obj.get("fingerprint"):
        raise FingerprintMismatch(f"fingerprint mismatch in {path}")
    result = SearchResult(
        float(obj["best_margin"]), x, y, t, tuple(obj["seed_lineage"]),
        [float(m) for m in obj.get("margin_history", [])],
        [(int(r), float(m)) for r, m in obj.get("leaderboard", [])],
    )
    recomputed = margin(x, y, t)
    if abs(recomputed - result.best_margin) > RELOAD_TOL:
        raise FingerprintMismatch(
            f"stored margin {result.best_margin!r} does not reproduce ({recomputed!r})"
        )
    return result
