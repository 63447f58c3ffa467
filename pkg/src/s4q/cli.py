"""Batch driver for the verification suites.

Exit status: 0 when every record passes, 2 when any record fails and 1 on a
configuration error (no suite is run in that case).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction

from .basis import enumerate_space, parse_half_integer, simple_space
from .fredholm import level_tail_bound
from .parallel import ordered_map
from .qnum import QContext
from .report import RECORD_FIELDS, SCHEMA_VERSION, CheckRecord

__all__ = ["SUITES", "ConfigError", "Config", "main", "run", "render"]

SUITES = ("relations", "idempotent", "pairing", "zeta", "real", "approx")
SIMPLE_K = 40
# relation words move l by at most 2, so the interior needs l <= L - 2 to be non-empty
MIN_TWO_L = 5
# three smoothing cutoffs L-4, L-2, L with the smallest still above MIN_TWO_L
MIN_TWO_L_REAL = MIN_TWO_L + 8


class ConfigError(ValueError):
    """Flags that cannot produce a meaningful report."""


class Config:
    """Validated run configuration; ``two_L`` is the doubled spinor cutoff."""

    def __init__(self, suites, qs, two_L: int, tol: float | None = None):
        self.suites = tuple(suites)
        self.qs = tuple(qs)
        self.two_L = two_L
        self.tol = tol

    @property
    def spinor_cutoff(self) -> str:
        return str(Fraction(self.two_L, 2))

    @property
    def scalar_cutoff(self) -> int:
        return (self.two_L - 1) // 2


def _parse_cutoff(text) -> int:
    try:
        two = parse_half_integer(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cutoff {text!r} is not a half-integer") from exc
    # the spinor levels are half-odd; an integer cutoff rounds down to the one below
    return two if two % 2 == 1 else two - 1


def make_config(suite: str, qs, cutoff, tol=None) -> Config:
    if suite != "all" and suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITES + ('all',))}")
    suites = SUITES if suite == "all" else (suite,)
    qs = list(qs) if qs else [0.5]
    for q in qs:
        if not (0.0 < q < 1.0):
            raise ConfigError(f"q must lie in (0, 1), got {q}")
    if tol is not None and not tol > 0:
        raise ConfigError("--tol must be positive")
    two_L = _parse_cutoff(cutoff)
    if two_L < MIN_TWO_L:
        raise ConfigError(f"cutoff {Fraction(two_L, 2)} is below the minimum {Fraction(MIN_TWO_L, 2)} "
                          "needed by the longest relation words")
    if "pairing" in suites:
        for q in qs:
            # the geometric tail majorant must close at the cutoff for the truncation to be certified
            if not math.isfinite(level_tail_bound(two_L / 2, q)):
                raise ConfigError(f"tail bounds exceed the budget at q={q}, cutoff {Fraction(two_L, 2)}: "
                                  "the level-tail majorant does not converge from this cutoff")
    if "real" in suites and two_L < MIN_TWO_L_REAL:
        raise ConfigError(f"the real suite needs cutoff >= {Fraction(MIN_TWO_L_REAL, 2)} "
                          "for its three smoothing cutoffs")
    return Config(suites, qs, two_L, tol)


def _suite_records(suite: str, q: float, cfg: Config) -> list[CheckRecord]:
    ctx = QContext(q) if cfg.tol is None else QContext(q, tol_relation=cfg.tol)
    L = cfg.spinor_cutoff
    if suite == "relations":
        from .sphere_alg import relations_suite

        out = []
        for space in (simple_space(SIMPLE_K), enumerate_space("scalar", cfg.scalar_cutoff),
                      enumerate_space("spinor", L)):
            out += relations_suite(space, ctx)
        return out
    if suite == "idempotent":
        from .sphere_alg import highest_weight_checks, idempotent_suite

        return (idempotent_suite(simple_space(SIMPLE_K), ctx)
                + highest_weight_checks(enumerate_space("scalar", cfg.scalar_cutoff), ctx))
    if suite == "pairing":
        from .fredholm import pairing_suite

        return pairing_suite(ctx, L)
    if suite == "zeta":
        from .dirac_zeta import zeta_suite

        return zeta_suite(ctx, enumerate_space("spinor", L))
    if suite == "real":
        from .real_structure import real_suite

        cuts = tuple(str(Fraction(cfg.two_L - d, 2)) for d in (8, 4, 0))
        return real_suite(ctx, L, cutoffs=cuts)
    if suite == "approx":
        from .approx_rep import approx_suite

        return approx_suite(ctx, L)
    raise ConfigError(f"unknown suite {suite!r}")


def run(cfg: Config) -> list[CheckRecord]:
    """All records for the configuration, sorted deterministically."""
    jobs = [(s, q) for s in cfg.suites for q in cfg.qs]
    results = ordered_map(lambda job: _suite_records(job[0], job[1], cfg), jobs)
    records = [r for chunk in results for r in chunk]
    return sorted(records, key=CheckRecord.sort_key)


def render(records, fmt: str = "json", details: bool = False) -> str:
    rows = [r.as_dict(details=details) for r in records]
    if fmt == "json":
        return json.dumps({"schema": SCHEMA_VERSION, "records": rows}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=RECORD_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()
                        if k in RECORD_FIELDS})
        return buf.getvalue()
    raise ConfigError(f"unknown format {fmt!r}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="s4q", description="Numerical checks for the orthogonal quantum 4-sphere.")
    p.add_argument("command", nargs="?", default=None, help=f"suite to run: {', '.join(SUITES)} or all")
    p.add_argument("--suite", default=None, help="same as the positional command")
    p.add_argument("--q", type=float, action="append", help="deformation parameter (repeatable, default 0.5)")
    p.add_argument("--cutoff", default="25/2", help='spinor cutoff L, as "25/2" or "12.5"')
    p.add_argument("--tol", type=float, default=None, help="relation tolerance override")
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--details", action="store_true", help="include per-level arrays and other extras (json)")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    suite = args.suite or args.command
    if args.suite and args.command and args.suite != args.command:
        print(f"error: conflicting suites {args.command!r} and {args.suite!r}", file=sys.stderr)
        return 1
    try:
        cfg = make_config(suite or "all", args.q, args.cutoff, args.tol)
        records = run(cfg)
        text = render(records, args.format, args.details)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failed = [r for r in records if not r.passed]
    for r in failed:
        print(r, file=sys.stderr)
    print(f"{len(records) - len(failed)}/{len(records)} checks passed", file=sys.stderr)
    return 2 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
