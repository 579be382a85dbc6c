"""
Command-line front end.

Subcommands build tables (beta exponents, spin polynomials, eigenvalue
signs), verify the residue table and run the identity suite. Exit codes:
0 success, 1 usage error, 2 computation failure, 3 selftest failure.
"""

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import sympy

import config
import eigen
import ingest
import series
from combinat import beta_table
from exactalg import u_grid
from lfactor import LiftSpec, classical_spin_Q
from utils.emit import FORMATS, TableReport, emit, sign_label
from utils.surd import Surd

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTATION = 2
EXIT_SELFTEST = 3

SUBCOMMANDS = (
    "alpha-beta-table",
    "q-poly",
    "lambda-p-table",
    "threshold",
    "lambda-pr-table",
    "verify-appendix",
    "c-r-threshold",
    "selftest",
)


class UsageError(Exception):
    """Command line that cannot be turned into a valid run."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ============================================================================
# Run configuration
# ============================================================================


def parse_prime_range(text: str) -> Tuple[int, int]:
    """'LO..HI' -> (LO, HI)."""
    try:
        lo, hi = (int(part) for part in text.split(".."))
    except ValueError:
        raise UsageError(f"Prime range must look like LO..HI, got {text!r}")
    if lo < 2 or hi < lo:
        raise UsageError(f"Invalid prime range {text!r}")
    return lo, hi


def parse_point(text: str) -> Tuple[int, Fraction]:
    """'p,u' -> (p, u) with u rational."""
    try:
        p_text, u_text = text.split(",")
        return int(p_text), Fraction(u_text)
    except ValueError:
        raise UsageError(f"Evaluation point must look like p,u (e.g. 5,1/3), got {text!r}")


@dataclass
class RunConfig:
    """Validated options of one invocation."""

    subcommand: str
    n: int = 2
    genus: int = 4
    weight_2k: Optional[int] = None
    prime_lo: int = field(default_factory=lambda: getattr(config, "DEFAULT_PRIME_LO", 2))
    prime_hi: int = field(default_factory=lambda: getattr(config, "DEFAULT_PRIME_HI", 997))
    r: int = 1
    u_grid: int = field(default_factory=lambda: getattr(config, "DEFAULT_U_GRID", 101))
    precision: int = field(default_factory=lambda: getattr(config, "DEFAULT_PRECISION_BITS", 128))
    input_path: Optional[Path] = None
    numerator_path: Optional[Path] = None
    eigenform_path: Optional[Path] = None
    builtin: Optional[str] = None
    output: Optional[Path] = None
    fmt: str = "csv"
    workers: int = field(default_factory=lambda: getattr(config, "DEFAULT_WORKERS", 1))
    symbolic: bool = False
    at: Optional[Tuple[int, Fraction]] = None
    variant: str = "corrected"
    progress: bool = True

    def validate(self) -> "RunConfig":
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"Unknown subcommand {self.subcommand!r}")
        if self.fmt not in FORMATS:
            raise UsageError(f"Unknown format {self.fmt!r}")
        if self.n < 1:
            raise UsageError(f"--n must be positive, got {self.n}")
        if self.genus not in (2, 4):
            raise UsageError(f"--genus must be 2 or 4, got {self.genus}")
        if self.weight_2k is not None and (self.weight_2k < 2 or self.weight_2k % 2):
            raise UsageError(f"--weight-2k must be a positive even integer, got {self.weight_2k}")
        if self.r < 0:
            raise UsageError(f"--r must be non-negative, got {self.r}")
        if self.u_grid < 2:
            raise UsageError(f"--u-grid needs at least 2 points, got {self.u_grid}")
        if self.precision < 32:
            raise UsageError(f"--precision must be at least 32 bits, got {self.precision}")
        if self.eigenform_path and self.builtin:
            raise UsageError("Give at most one of --eigenform and --builtin")
        if self.at is not None and self.weight_2k is None:
            raise UsageError("--at needs --weight-2k")
        if self.subcommand in ("lambda-pr-table", "c-r-threshold") and self.weight_2k is None:
            raise UsageError(f"{self.subcommand} needs --weight-2k")
        if self.subcommand == "lambda-p-table" and self.weight_2k is None and not self.has_eigenform:
            raise UsageError("lambda-p-table needs --weight-2k or eigenform data")
        return self

    @property
    def k(self) -> Optional[int]:
        return None if self.weight_2k is None else self.weight_2k // 2

    @property
    def has_eigenform(self) -> bool:
        return bool(self.eigenform_path or self.builtin)

    def primes(self) -> List[int]:
        return list(sympy.primerange(self.prime_lo, self.prime_hi + 1))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--precision", type=int, default=getattr(config, "DEFAULT_PRECISION_BITS", 128),
                        help="Working precision of numeric sign decisions in bits")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default="csv", help="Output format")
    common.add_argument("--output", type=Path, help="Output file (default: stdout)")
    common.add_argument("--workers", type=int, default=getattr(config, "DEFAULT_WORKERS", 1),
                        help="Worker processes for prime scans")
    common.add_argument("--verbose", action="store_true", help="Debug logging")
    common.add_argument("--no-progress", dest="progress", action="store_false", help="Hide progress bars")

    parser = _Parser(prog="ikeda-signs", description="Signs of Hecke eigenvalues of Ikeda lifts")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("alpha-beta-table", parents=[common], help="alpha and beta exponent table")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("q-poly", parents=[common], help="Spin L-factor denominator Q")
    p.add_argument("--genus", type=int, choices=(2, 4), default=4)
    p.add_argument("--weight-2k", dest="weight_2k", type=int)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--symbolic", action="store_true", help="Coefficients at generic a and k")
    mode.add_argument("--at", type=parse_point, help="Exact coefficients at p,u")

    p = sub.add_parser("lambda-p-table", parents=[common], help="lambda(p) signs over primes")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--weight-2k", dest="weight_2k", type=int)
    p.add_argument("--primes", type=parse_prime_range)
    p.add_argument("--u-grid", dest="u_grid", type=int, default=getattr(config, "DEFAULT_U_GRID", 101))
    p.add_argument("--eigenform", dest="eigenform_path", type=Path)
    p.add_argument("--builtin", choices=("delta",))

    p = sub.add_parser("threshold", parents=[common], help="Prime beyond which lambda(p) > 0")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("lambda-pr-table", parents=[common], help="lambda(p^r) signs over primes")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--genus", type=int, choices=(2, 4), default=4)
    p.add_argument("--weight-2k", dest="weight_2k", type=int)
    p.add_argument("--numerator", dest="numerator_path", type=Path)
    p.add_argument("--variant", choices=("printed", "corrected"), default="corrected")
    p.add_argument("--primes", type=parse_prime_range)
    p.add_argument("--u-grid", dest="u_grid", type=int, default=getattr(config, "DEFAULT_U_GRID", 101))

    p = sub.add_parser("verify-appendix", parents=[common], help="Check the residue table")
    p.add_argument("--file", dest="input_path", type=Path)

    p = sub.add_parser("c-r-threshold", parents=[common], help="Empirical sign threshold for lambda(p^r)")
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--weight-2k", dest="weight_2k", type=int)
    p.add_argument("--numerator", dest="numerator_path", type=Path)
    p.add_argument("--prime-hi", dest="prime_hi", type=int, default=getattr(config, "DEFAULT_PRIME_HI", 997))
    p.add_argument("--u-grid", dest="u_grid", type=int, default=getattr(config, "DEFAULT_U_GRID", 101))

    sub.add_parser("selftest", parents=[common], help="Run the identity suite")
    return parser


def parse_args(argv: Optional[Sequence[str]] = None) -> Tuple[RunConfig, bool]:
    """RunConfig and the verbose flag."""
    args = build_parser().parse_args(argv)
    values = {
        key: value
        for key, value in vars(args).items()
        if key in RunConfig.__dataclass_fields__ and value is not None
    }
    primes = getattr(args, "primes", None)
    if primes:
        values["prime_lo"], values["prime_hi"] = primes
    return RunConfig(**values).validate(), args.verbose


# ============================================================================
# Reports
# ============================================================================


def _less(lhs, rhs) -> bool:
    """lhs < rhs; exact over one sqrt(p), numeric at VERIFY_PRECISION_BITS across primes."""
    if not isinstance(lhs, Surd) or not isinstance(rhs, Surd):
        return lhs < rhs
    if lhs.is_rational or rhs.is_rational or lhs.p == rhs.p:
        return lhs < rhs
    bits = getattr(config, "VERIFY_PRECISION_BITS", 256)
    return lhs.to_mpf(bits) < rhs.to_mpf(bits)


@dataclass
class SignReport:
    """Certified signs with a summary of the smallest value and first negative."""

    name: str
    rows: List[eigen.SignRow]

    @property
    def negatives(self) -> List[eigen.SignRow]:
        return [row for row in self.rows if row.sign is not None and row.sign < 0]

    @property
    def indeterminate(self) -> int:
        return sum(1 for row in self.rows if row.sign is None)

    def minimum(self) -> Optional[eigen.SignRow]:
        exact = [row for row in self.rows if row.value is not None]
        if not exact:
            return None
        best = exact[0]
        for row in exact[1:]:
            if _less(row.value, best.value):
                best = row
        return best

    def to_table(self) -> TableReport:
        table = TableReport(self.name, ("p", "u", "value", "sign"))
        for row in self.rows:
            table.add(row.p, row.u, row.value, sign_label(row.sign))
        lowest = self.minimum()
        first = self.negatives[0] if self.negatives else None
        table.summary = {
            "points": len(self.rows),
            "negative": len(self.negatives),
            "indeterminate": self.indeterminate,
            "min_value": None if lowest is None else lowest.value,
            "min_at": None if lowest is None else {"p": lowest.p, "u": lowest.u},
            "first_negative": None if first is None else {"p": first.p, "u": first.u},
        }
        return table


# ============================================================================
# Subcommands
# ============================================================================


def _eigenform(cfg: RunConfig) -> Optional[ingest.EigenformData]:
    if cfg.eigenform_path:
        return ingest.load_eigenform(cfg.eigenform_path)
    if cfg.builtin == "delta":
        return ingest.builtin_delta(cfg.prime_hi)
    return None


def run_alpha_beta_table(cfg: RunConfig):
    table = TableReport("alpha-beta-table", ("n", "j", "r", "alpha", "beta"))
    for j, r, a, b in beta_table(cfg.n).rows():
        table.add(cfg.n, j, r, a, b)
    return table


def run_q_poly(cfg: RunConfig):
    Q = classical_spin_Q(LiftSpec(cfg.genus // 2, cfg.k))
    table = TableReport("q-poly", ("j", "coefficient"))
    if cfg.at is not None:
        p, u = cfg.at
        for j, value in enumerate(Q.evaluate_exact(p, cfg.k, u)):
            table.add(j, value)
        return table
    for j, text in Q.render_rows():
        table.add(j, text)
    return table


def run_lambda_p_table(cfg: RunConfig):
    data = _eigenform(cfg)
    primes = cfg.primes()
    if data is not None:
        k = data.k
        if cfg.weight_2k is not None and cfg.weight_2k != data.weight_2k:
            raise UsageError(f"--weight-2k {cfg.weight_2k} disagrees with eigenform weight {data.weight_2k}")
        ingest.check_lift_parity(cfg.n, k)
        rows = eigen.sign_scan(cfg.n, k, primes, u_by_prime=ingest.satake_table(data, primes), workers=cfg.workers)
    else:
        ingest.check_lift_parity(cfg.n, cfg.k)
        rows = eigen.sign_scan(cfg.n, cfg.k, primes, u_grid(cfg.u_grid), workers=cfg.workers)
    return SignReport("lambda-p-table", rows).to_table()


def run_threshold(cfg: RunConfig):
    p0 = eigen.first_sign_threshold(cfg.n)
    return {"n": cfg.n, "p0": p0, "bounds": eigen.crude_bounds(cfg.n)}


def _numerator(cfg: RunConfig, genus: int) -> series.NumeratorData:
    if genus == 2:
        return series.genus2_numerator(cfg.variant)
    return series.load_numerator(cfg.numerator_path)


def run_lambda_pr_table(cfg: RunConfig):
    numerator = _numerator(cfg, cfg.genus)
    rows = series.lambda_pr_sign_scan(
        numerator, cfg.r, cfg.k, cfg.primes(), u_grid(cfg.u_grid), workers=cfg.workers
    )
    return SignReport("lambda-pr-table", rows).to_table()


def run_verify_appendix(cfg: RunConfig):
    table = TableReport("verify-appendix", ("index", "pole", "order", "method", "status", "max_rel_error"))
    checks = series.verify_appendix(cfg.input_path)
    for check in checks:
        table.add(check.index, check.pole, check.order, check.method, check.status, check.max_rel_error)
    table.summary = {"rows": len(checks), "matched": sum(1 for c in checks if c.matched)}
    return table


def run_c_r_threshold(cfg: RunConfig):
    numerator = _numerator(cfg, 4)
    report = series.threshold_c_r(cfg.r, cfg.k, numerator, cfg.prime_hi, cfg.u_grid, cfg.workers)
    return report.to_dict()


HANDLERS = {
    "alpha-beta-table": run_alpha_beta_table,
    "q-poly": run_q_poly,
    "lambda-p-table": run_lambda_p_table,
    "threshold": run_threshold,
    "lambda-pr-table": run_lambda_pr_table,
    "verify-appendix": run_verify_appendix,
    "c-r-threshold": run_c_r_threshold,
}


def _apply_globals(cfg: RunConfig):
    config.DEFAULT_PRECISION_BITS = cfg.precision
    config.SHOW_PROGRESS = cfg.progress and getattr(config, "SHOW_PROGRESS", True)


def execute(cfg: RunConfig) -> int:
    """Run a validated configuration and write its output."""
    _apply_globals(cfg)
    if cfg.subcommand == "selftest":
        import selftest

        results = selftest.run_all()
        return EXIT_OK if all(result.passed for result in results) else EXIT_SELFTEST
    logger.info(f"Running {cfg.subcommand}")
    report = HANDLERS[cfg.subcommand](cfg)
    emit(report, cfg.fmt, cfg.output)
    if cfg.subcommand == "verify-appendix" and report.summary["matched"] != report.summary["rows"]:
        logger.error(f"Residue table: {report.summary['rows'] - report.summary['matched']} rows do not match")
        return EXIT_COMPUTATION
    return EXIT_OK


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse argv, run the subcommand and map failures to exit codes.

    Args:
        argv: arguments without the program name; None reads sys.argv

    Returns:
        Process exit status
    """
    try:
        cfg, verbose = parse_args(argv)
    except UsageError as e:
        build_parser().print_help(sys.stderr)
        logger.error(str(e))
        return EXIT_USAGE
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    try:
        return execute(cfg)
    except UsageError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except (ValueError, ArithmeticError, LookupError, OSError, RuntimeError) as e:
        logger.error(f"{cfg.subcommand} failed: {e}")
        return EXIT_COMPUTATION
