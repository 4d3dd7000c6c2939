"""Command-line entry point: ``bourinlab {verify,sweep,search,certify}``.

Exit codes: 0 pass, 1 violation in a proved range (or a library bug),
2 input or I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import search as search_mod
from .dense import InvalidInputError
from .io import (
    SUMMARY_HEADER, SWEEP_HEADER, atomic_write_text, read_matrix, reports_to_jsonl, rows_to_csv,
    summary_csv,
)
from .sampling import SPECTRUM_LAWS
from .spectrum import DEFAULT_TOL, AlgebraModel
from .verifier import (
    INEQUALITY_IDS, SUITE_ORDER, CheckReport, ConsistencyError, Lemma21Instance, PsdOperator,
    SuiteConfig, check_bourin_pq, check_bourin_t, check_constant_bounds, check_cor_bt_ft,
    check_ft, check_lemma_2_1_suite, check_lemma_3_1_gram, check_lemma_3_2, check_lemma_3_6,
    check_lemma_3_8_1, check_lemma_3_8_2, check_thm_cauchy_schwarz_Bt, exit_code,
    in_proved_range, run_suite, summarize,
)
from .spectrum import BlockOperator

log = logging.getLogger("bourinlab")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2

CSV_HELP = (
    "CSV columns: verify summary = " + ",".join(SUMMARY_HEADER)
    + "; sweep = " + ",".join(SWEEP_HEADER)
    + "; search leaderboard = restart,best_margin. A header row is always written."
)


class UsageError(InvalidInputError):
    pass


def parse_dims(text: str) -> tuple[int, ...]:
    """``"2..8"`` (inclusive range) or ``"2,3,5"``."""
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split(".."))
            dims = tuple(range(lo, hi + 1))
        else:
            dims = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise UsageError(f"bad --dims {text!r}") from exc
    if not dims or min(dims) < 1:
        raise UsageError(f"bad --dims {text!r}")
    return dims


def parse_grid(text: str) -> tuple[float, ...]:
    """``"start:stop:count"`` (inclusive linspace) or a comma-separated list."""
    try:
        if ":" in text:
            lo, hi, count = text.split(":")
            grid = tuple(float(v) for v in np.linspace(float(lo), float(hi), int(count)))
        else:
            grid = tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc
    if not grid:
        raise UsageError("empty grid")
    return grid


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            atomic_write_text(Path(out), text)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _tol(value: float) -> float:
    if not value > 0:
        raise UsageError("--tol must be positive")
    return value


# -- verify ---------------------------------------------------------------------


def cmd_verify(args) -> int:
    config = SuiteConfig(
        seed=args.seed,
        trials=args.trials,
        dims=parse_dims(args.dims),
        tol=_tol(args.tol),
        model=AlgebraModel.parse(args.model) if args.model else None,
        law=args.law,
    )
    if args.t_grid:
        config.t_grid = parse_grid(args.t_grid)
    if args.checks:
        config.checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    config.validate()
    reports = run_suite(config)
    if args.format == "csv":
        _emit(summary_csv(summarize(reports)), args.out)
    else:
        _emit(reports_to_jsonl(reports), args.out)
    code = exit_code(reports)
    log.info("verify: %d reports, exit %d", len(reports), code)
    return code


# -- sweep ----------------------------------------------------------------------


def _load_pair(args) -> tuple[PsdOperator, PsdOperator]:
    x = read_matrix(args.x)
    y = read_matrix(args.y)
    if x.shape != y.shape:
        raise UsageError(f"dimension mismatch: x is {x.shape[0]}, y is {y.shape[0]}")
    return PsdOperator.from_any(x, "x"), PsdOperator.from_any(y, "y")


def cmd_sweep(args) -> int:
    x, y = _load_pair(args)
    tol = _tol(args.tol)
    grid = parse_grid(args.t_grid) if args.t_grid else tuple(np.linspace(0.0, 1.0, 21))
    rows = search_mod.sweep_t(x, y, grid)
    _emit(rows_to_csv(SWEEP_HEADER, rows), args.out)
    bad = [r for r in rows if in_proved_range(r.t) and r.margin > tol]
    return EXIT_VIOLATION if bad else EXIT_OK


# -- search ---------------------------------------------------------------------


def cmd_search(args) -> int:
    config = search_mod.SearchConfig(
        seed=args.seed,
        dimension=args.dimension,
        restarts=args.restarts,
        steps_per_restart=args.steps,
        t=args.t,
        perturbation_scale=args.scale,
        spectrum_law=args.law,
        workers=args.workers,
    )
    initial = search_mod.load(args.resume) if args.resume else None
    result = search_mod.hill_climb(config, initial)
    summary = {
        "best_margin": result.best_margin,
        "t": result.t,
        "seed_lineage": list(result.seed_lineage),
        "fingerprint": result.fingerprint,
        "range": "proved" if in_proved_range(result.t) else "open",
        "history_length": len(result.margin_history),
    }
    if args.out:
        try:
            search_mod.persist(result, args.out)
            atomic_write_text(
                Path(str(args.out) + ".leaderboard.csv"),
                rows_to_csv(["restart", "best_margin"], result.leaderboard),
            )
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from exc
    sys.stdout.write(json.dumps(summary) + "\n")
    return EXIT_OK


# -- certify --------------------------------------------------------------------


def _z_operand(args, x: PsdOperator) -> BlockOperator:
    if args.z:
        z = read_matrix(args.z)
        if z.shape[0] != x.model.sizes[0]:
            raise UsageError("dimension mismatch between z and x")
        return BlockOperator.single(z)
    return BlockOperator.single(np.eye(x.model.sizes[0], dtype=complex))


def _require_t(args) -> float:
    if args.t is None:
        raise UsageError("--t is required for this check")
    return args.t


def _pick(reports: list[CheckReport], check_id: str, note: str | None = None) -> list[CheckReport]:
    out = [r for r in reports if r.check_id == check_id and (note is None or r.notes == note)]
    if not out:
        raise UsageError(f"{check_id} is not defined at the requested parameters")
    return out


def certify(check_id: str, x, y, args) -> list[CheckReport]:
    tol = _tol(args.tol)
    if check_id == "bourin_t":
        return [check_bourin_t(x, y, _require_t(args), tol)]
    if check_id == "thm_bt":
        t = _require_t(args)
        if not in_proved_range(t):
            raise UsageError("thm_bt is only proved for t in [0, 1/4] u [3/4, 1]")
        return [check_bourin_t(x, y, t, tol, check_id="thm_bt")]
    if check_id == "bourin_pq":
        if args.p is None or args.q is None:
            raise UsageError("bourin_pq needs --p and --q")
        return [check_bourin_pq(x, y, args.p, args.q, tol)]
    if check_id in {"bourin_const_half", "f_const_2t1", "f_const_4t3", "b_const_upper",
                    "b_const_lower"}:
        return _pick(check_constant_bounds(x, y, _require_t(args), tol), check_id)
    if check_id == "prop_f34":
        return [check_ft(x, y, 0.75, tol)]
    if check_id == "thm_ft":
        return [check_ft(x, y, _require_t(args), tol)]
    if check_id == "thm_cauchy_schwarz_Bt":
        return [check_thm_cauchy_schwarz_Bt(x, y, _z_operand(args, x), _require_t(args), tol=tol)]
    if check_id == "cor_bt_ft":
        return [check_cor_bt_ft(x, y, _require_t(args), tol=tol)]
    if check_id == "lem_3_1_gram":
        return [check_lemma_3_1_gram(x, y, _z_operand(args, x), _require_t(args), tol)]
    if check_id == "lem_3_6":
        return [check_lemma_3_6(x, y, tol)]
    if check_id == "lem_3_8_1":
        p = 1.0 if args.param is None else args.param
        return [check_lemma_3_8_1(x, y, p, tol)]
    if check_id == "lem_3_8_2":
        r = 2.0 if args.param is None else args.param
        return [check_lemma_3_8_2(x, y, r, tol)]
    if check_id in {"lem_3_2_holder", "lem_3_2_heinz"}:
        m = 2.0 if args.param is None else args.param
        reports = check_lemma_3_2(x, y, _z_operand(args, x), _require_t(args), m, tol)
        return _pick(reports, check_id)
    if check_id == "lem_2_1_props":
        z = _z_operand(args, x)
        xb, yb = x.as_block(), y.as_block()
        inst = Lemma21Instance(xb, yb, xb, yb, z, z.adjoint())
        return check_lemma_2_1_suite([inst], tol)
    raise UsageError(f"unknown check id {check_id!r}")


def cmd_certify(args) -> int:
    if args.check not in INEQUALITY_IDS:
        raise UsageError(f"unknown check id {args.check!r}; choose from {', '.join(INEQUALITY_IDS)}")
    if args.check == "lem_3_8_1":
        # x and y are general matrices with xy self-adjoint
        x, y = read_matrix(args.x), read_matrix(args.y)
        if x.shape != y.shape:
            raise UsageError(f"dimension mismatch: x is {x.shape[0]}, y is {y.shape[0]}")
    else:
        x, y = _load_pair(args)
    reports = certify(args.check, x, y, args)
    _emit(reports_to_jsonl(reports), args.out)
    return EXIT_OK if all(r.holds for r in reports) else EXIT_VIOLATION


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bourinlab",
        description="Numerical verification of unitarily invariant norm inequalities "
                    "for matrix means.",
        epilog=CSV_HELP,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help="output file (default: stdout)"):
        p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative tolerance")
        p.add_argument("--out", help=out_help)

    p = sub.add_parser("verify", help="run the randomized oracle suite", epilog=CSV_HELP)
    common(p)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=1000, help="instances per dimension")
    p.add_argument("--dims", default="2..8", help='"lo..hi" or "n1,n2,..."')
    p.add_argument("--t-grid", help='"start:stop:count" or comma list for the main inequality')
    p.add_argument("--model", help='block model "n1:w1,n2:w2,..." (overrides --dims)')
    p.add_argument("--law", default="mixed", choices=("mixed",) + SPECTRUM_LAWS)
    p.add_argument("--checks", help=f"comma list from {','.join(SUITE_ORDER)}")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="json: one report per line; csv: per-check summary")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="margin of the main inequality along a t grid",
                       epilog=CSV_HELP)
    common(p)
    p.add_argument("--x", required=True, help="matrix JSON file")
    p.add_argument("--y", required=True, help="matrix JSON file")
    p.add_argument("--t-grid", help='"start:stop:count" or comma list (default 0:1:21)')
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="hill-climb for large margins", epilog=CSV_HELP)
    p.add_argument("--out", help="candidate JSON (leaderboard goes to <out>.leaderboard.csv)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--steps", type=int, default=200, help="steps per restart")
    p.add_argument("--dimension", "--dims", type=int, default=3)
    p.add_argument("--t", type=float, help="fixed t in [1/4, 3/4]; omit to optimise t jointly")
    p.add_argument("--scale", type=float, default=0.1, help="perturbation scale")
    p.add_argument("--law", default="uniform", choices=SPECTRUM_LAWS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--resume", help="seed the search with a persisted candidate")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("certify", help="run one named check on matrix files")
    common(p)
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--z", help="contraction/weight matrix (default: identity)")
    p.add_argument("--check", required=True, help=f"one of {', '.join(INEQUALITY_IDS)}")
    p.add_argument("--t", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--param", type=float, help="power p, r or Hoelder exponent m")
    p.set_defaults(func=cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (search_mod.LibraryBugError, ConsistencyError) as exc:
        print(f"library bug: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
