import pytest
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import config
from cli import (
    EXIT_COMPUTATION, EXIT_OK, EXIT_USAGE, RunConfig, SignReport, UsageError, dispatch, parse_args, parse_point,
    parse_prime_range,
)
from eigen import SignRow
from ingest import EigenformData, save_eigenform
from utils.emit import load_report
from utils.surd import Surd


@pytest.fixture(autouse=True)
def restore_globals(monkeypatch):
    """dispatch writes precision and progress into config."""
    monkeypatch.setattr(config, "DEFAULT_PRECISION_BITS", config.DEFAULT_PRECISION_BITS)


def _csv(path):
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.reader(f))


class TestArgumentParsing:
    """argv to RunConfig."""

    def test_prime_range(self):
        """LO..HI with 2 <= LO <= HI."""
        assert parse_prime_range("2..97") == (2, 97)
        for text in ("97..2", "1..10", "2-97"):
            with pytest.raises(UsageError):
                parse_prime_range(text)

    def test_point(self):
        """p,u with rational u."""
        assert parse_point("5,-1/3") == (5, Fraction(-1, 3))
        with pytest.raises(UsageError):
            parse_point("5")

    def test_defaults(self):
        """Unset options fall back to config."""
        cfg, verbose = parse_args(["lambda-p-table", "--weight-2k", "12", "--primes", "3..7"])
        assert (cfg.prime_lo, cfg.prime_hi) == (3, 7)
        assert cfg.primes() == [3, 5, 7]
        assert cfg.k == 6
        assert cfg.u_grid == config.DEFAULT_U_GRID
        assert not verbose

    @pytest.mark.parametrize("kwargs", [
        {"subcommand": "nope"},
        {"subcommand": "threshold", "n": 0},
        {"subcommand": "lambda-pr-table"},
        {"subcommand": "lambda-p-table"},
        {"subcommand": "q-poly", "at": (2, Fraction(0))},
        {"subcommand": "lambda-p-table", "builtin": "delta", "eigenform_path": Path("x.json")},
        {"subcommand": "threshold", "fmt": "xml"},
        {"subcommand": "threshold", "precision": 8},
    ])
    def test_invalid_config(self, kwargs):
        """Inconsistent options are usage errors."""
        with pytest.raises(UsageError):
            RunConfig(**kwargs).validate()


class TestCliTables:
    """Subcommands run through dispatch."""

    def test_cli_alpha_beta_table(self, temp_output_dir):
        """Header and one row per reachable (j, r)."""
        out = temp_output_dir / "ab.csv"
        assert dispatch(["alpha-beta-table", "--n", "2", "--output", str(out)]) == EXIT_OK
        rows = _csv(out)
        assert rows[0] == ["n", "j", "r", "alpha", "beta"]
        assert len(rows) == 11
        assert rows[1] == ["2", "0", "0", "1", "1"]

    def test_cli_stdout(self, capsys):
        """Without --output the table goes to stdout."""
        assert dispatch(["alpha-beta-table", "--n", "1"]) == EXIT_OK
        assert capsys.readouterr().out.splitlines()[0] == "n,j,r,alpha,beta"

    def test_cli_q_poly_symbolic(self, temp_output_dir):
        """Seventeen coefficients for genus 4."""
        out = temp_output_dir / "q.csv"
        assert dispatch(["q-poly", "--genus", "4", "--symbolic", "--output", str(out)]) == EXIT_OK
        rows = _csv(out)
        assert rows[0] == ["j", "coefficient"]
        assert len(rows) == 18
        assert rows[1] == ["0", "1"]

    def test_cli_q_poly_at_point(self, temp_output_dir):
        """Exact coefficients at p = 2, u = 0 for weight 12."""
        out = temp_output_dir / "q2.csv"
        assert dispatch(["q-poly", "--genus", "2", "--weight-2k", "12", "--at", "2,0", "--output", str(out)]) == EXIT_OK
        rows = _csv(out)
        assert len(rows) == 6
        assert float(rows[2][1]) == pytest.approx(-96)

    def test_cli_lambda_p_builtin_delta(self, temp_output_dir):
        """Every prime is positive for the Saito-Kurokawa lift of Delta; lambda(2) = 72."""
        out = temp_output_dir / "delta.json"
        argv = ["lambda-p-table", "--n", "1", "--builtin", "delta", "--primes", "2..50",
                "--format", "json", "--output", str(out)]
        assert dispatch(argv) == EXIT_OK
        report = load_report(out)
        assert report.columns == ["p", "u", "value", "sign"]
        assert len(report.rows) == 15
        assert all(row[3] == "+" for row in report.rows)
        assert report.rows[0][2].startswith("72.000")
        assert report.summary["negative"] == 0

    def test_cli_lambda_p_grid(self, temp_output_dir):
        """Genus-4 grid scan is positive."""
        out = temp_output_dir / "grid.csv"
        argv = ["lambda-p-table", "--n", "2", "--weight-2k", "12", "--primes", "2..20", "--u-grid", "5",
                "--output", str(out)]
        assert dispatch(argv) == EXIT_OK
        rows = _csv(out)
        assert len(rows) == 1 + 8 * 5
        assert {row[3] for row in rows[1:]} == {"+"}

    def test_cli_lambda_p_eigenform_file(self, temp_output_dir):
        """User eigenform files are read; a weight mismatch is a usage error."""
        path = save_eigenform(EigenformData(12, {2: -24, 3: 252}, "delta"), temp_output_dir / "f.json")
        out = temp_output_dir / "f.csv"
        argv = ["lambda-p-table", "--n", "1", "--eigenform", str(path), "--primes", "2..3", "--output", str(out)]
        assert dispatch(argv) == EXIT_OK
        assert len(_csv(out)) == 3
        assert dispatch(argv + ["--weight-2k", "16"]) == EXIT_USAGE

    def test_cli_threshold(self, temp_output_dir):
        """JSON with p0 and the bounds."""
        out = temp_output_dir / "t.json"
        assert dispatch(["threshold", "--n", "1", "--output", str(out)]) == EXIT_OK
        data = json.loads(out.read_text(encoding="utf-8"))
        assert data["p0"] == 7
        assert data["bounds"] == {"-1": 1, "0": 2}

    def test_cli_lambda_pr_genus2(self, temp_output_dir):
        """Genus-2 lambda(p**2) needs no external data."""
        out = temp_output_dir / "pr.csv"
        argv = ["lambda-pr-table", "--r", "2", "--genus", "2", "--weight-2k", "12", "--primes", "2..11",
                "--u-grid", "3", "--output", str(out)]
        assert dispatch(argv) == EXIT_OK
        assert len(_csv(out)) == 1 + 5 * 3

    def test_cli_deterministic(self, temp_output_dir):
        """Two runs write identical bytes."""
        argv = ["lambda-p-table", "--n", "2", "--weight-2k", "12", "--primes", "2..13", "--u-grid", "4",
                "--format", "json", "--workers", "3", "--output"]
        first, second = temp_output_dir / "a.json", temp_output_dir / "b.json"
        assert dispatch(argv + [str(first)]) == EXIT_OK
        assert dispatch(argv + [str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()


class TestCliExitCodes:
    """Failures map to exit codes."""

    @pytest.mark.parametrize("argv", [
        [],
        ["frobnicate"],
        ["threshold"],
        ["alpha-beta-table", "--n", "0"],
        ["lambda-p-table", "--weight-2k", "12", "--primes", "9..2"],
        ["lambda-p-table", "--builtin", "delta", "--eigenform", "x.json"],
        ["c-r-threshold", "--r", "1"],
        ["q-poly", "--at", "2,0"],
    ])
    def test_cli_usage_errors(self, argv):
        """Bad command lines exit 1."""
        assert dispatch(argv) == EXIT_USAGE

    def test_cli_missing_numerator(self, temp_output_dir):
        """Genus-4 lambda(p**r) without numerator data exits 2."""
        argv = ["lambda-pr-table", "--r", "1", "--weight-2k", "12", "--primes", "2..5",
                "--numerator", str(temp_output_dir / "absent.json")]
        assert dispatch(argv) == EXIT_COMPUTATION
        argv = ["c-r-threshold", "--r", "1", "--weight-2k", "12", "--prime-hi", "11",
                "--numerator", str(temp_output_dir / "absent.json")]
        assert dispatch(argv) == EXIT_COMPUTATION

    def test_cli_bad_eigenform(self, temp_output_dir):
        """An eigenform file breaking the Deligne bound exits 2."""
        path = temp_output_dir / "bad.json"
        path.write_text(json.dumps({"weight_2k": 12, "ap": {"2": 10 ** 9}}), encoding="utf-8")
        argv = ["lambda-p-table", "--n", "1", "--eigenform", str(path), "--primes", "2..3"]
        assert dispatch(argv) == EXIT_COMPUTATION

    @pytest.mark.slow
    def test_cli_verify_appendix_full(self, temp_output_dir):
        """The bundled table verifies; a tampered row exits 2."""
        out = temp_output_dir / "v.csv"
        assert dispatch(["verify-appendix", "--output", str(out)]) == EXIT_OK
        assert {row[4] for row in _csv(out)[1:]} == {"match"}

        data = json.loads(Path(config.APPENDIX_DATA_FILE).read_text(encoding="utf-8"))
        data["rows"][2]["numerator"] = "2*(" + data["rows"][2]["numerator"] + ")"
        tampered = temp_output_dir / "tampered.json"
        tampered.write_text(json.dumps(data), encoding="utf-8")
        argv = ["verify-appendix", "--file", str(tampered), "--output", str(temp_output_dir / "t.csv")]
        assert dispatch(argv) == EXIT_COMPUTATION

    @pytest.mark.slow
    def test_cli_selftest_full(self, capsys):
        """Every identity holds."""
        assert dispatch(["selftest"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines and all(line.startswith("PASS") for line in lines)


class TestSignReport:
    """Summary rows of a scan."""

    def test_minimum_across_primes(self):
        """Values over different sqrt(p) compare numerically."""
        rows = [
            SignRow(2, 0, Surd(3, 1, 2), 1),
            SignRow(3, 0, Surd(5, -2, 3), 1),
            SignRow(5, 0, Surd(2, 0, 5), 1),
            SignRow(7, 0, None, 1),
        ]
        lowest = SignReport("grid", rows).minimum()
        # 5 - 2*sqrt(3) < 2 < 3 + sqrt(2)
        assert lowest.p == 3
        summary = SignReport("grid", rows).to_table().summary
        assert summary["min_at"] == {"p": 3, "u": 0}
        assert summary["points"] == 4

    def test_minimum_same_prime_exact(self):
        """Within one prime the comparison stays exact."""
        rows = [SignRow(5, 0, Surd(3, 1, 5), 1), SignRow(5, 1, Surd(6, -1, 5), 1)]
        assert SignReport("grid", rows).minimum().u == 1

    def test_minimum_empty(self):
        """No exact values, no minimum."""
        assert SignReport("grid", [SignRow(2, 0, None, None)]).minimum() is None

    def test_cli_grid_two_primes_summary(self, temp_output_dir):
        """A JSON grid over several primes carries a minimum in its summary."""
        out = temp_output_dir / "grid.json"
        argv = ["lambda-p-table", "--n", "2", "--weight-2k", "12", "--primes", "3..7", "--u-grid", "3",
                "--format", "json", "--output", str(out)]
        assert dispatch(argv) == EXIT_OK
        report = load_report(out)
        assert report.summary["points"] == 9
        assert report.summary["min_at"]["p"] in (3, 5, 7)


def test_cli_no_subcommand_prints_help(capsys):
    """Without a subcommand the full help goes to stderr."""
    assert dispatch([]) == EXIT_USAGE
    err = capsys.readouterr().err
    for name in ("lambda-p-table", "verify-appendix", "selftest"):
        assert name in err
