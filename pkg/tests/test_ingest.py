import pytest
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path

import sympy

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import config
from ingest import (
    EigenformData, EigenformDataError, builtin_delta, check_lift_parity, load_eigenform, satake_table,
    satake_u, save_eigenform, tau_oracle,
)
from utils.surd import Surd


@pytest.fixture(scope="module")
def tau():
    """tau(1..2500)."""
    return tau_oracle(2500)


class TestTauOracle:
    """Coefficients of the discriminant form."""

    def test_known_values(self, tau):
        """tau(1..7)."""
        assert tau[:7] == [1, -24, 252, -1472, 4830, -6048, -16744]

    def test_multiplicative(self, tau):
        """tau(mn) = tau(m) tau(n) for coprime m, n."""
        for m, n in [(2, 3), (4, 9), (5, 7), (8, 11), (13, 16)]:
            assert tau[m * n - 1] == tau[m - 1] * tau[n - 1]

    def test_hecke_relation(self, tau):
        """tau(p**2) = tau(p)**2 - p**11."""
        for p in sympy.primerange(2, 50):
            assert tau[p * p - 1] == tau[p - 1] ** 2 - p ** 11

    @pytest.mark.parametrize("N", [0, 100001])
    def test_limits(self, N):
        """N outside 1..TAU_ORACLE_MAX is refused."""
        with pytest.raises(ValueError):
            tau_oracle(N)


class TestEigenformData:
    """Validation of a(p) tables."""

    def test_deligne_bound(self):
        """|a(p)| <= 2 p**((2k-1)/2)."""
        with pytest.raises(EigenformDataError):
            EigenformData(12, {2: 10 ** 9})
        assert EigenformData(12, {2: 90}).k == 6

    @pytest.mark.parametrize("weight", [10, 13])
    def test_weight(self, weight):
        """Even weights from 12."""
        with pytest.raises(EigenformDataError):
            EigenformData(weight, {})

    def test_non_prime_key(self):
        """Keys are primes."""
        with pytest.raises(EigenformDataError):
            EigenformData(12, {4: -1472})


class TestSatake:
    """u = a + 1/a = a(p)/p**((2k-1)/2)."""

    def test_delta_at_two(self):
        """u = -24/2**(11/2) = -3 sqrt(2)/8."""
        sat = satake_u(builtin_delta(3), 2)
        assert sat.u == Surd(0, Fraction(-3, 8), 2)
        assert sat.decimal(6) == "-0.530330"
        assert abs(abs(sat.a) - 1) < 1e-20

    def test_missing_prime(self):
        """Primes without data raise."""
        with pytest.raises(EigenformDataError):
            satake_u(EigenformData(12, {2: -24}), 3)

    def test_table(self):
        """One u per prime, all in [-2, 2]."""
        table = satake_table(builtin_delta(50))
        assert sorted(table) == list(sympy.primerange(2, 51))
        assert all(-2 <= u <= 2 for u in table.values())


class TestEigenformFiles:
    """JSON eigenform files."""

    def test_save_and_load(self, temp_output_dir):
        """Saved data reads back equal."""
        data = builtin_delta(30)
        path = save_eigenform(data, temp_output_dir / "delta.json")
        assert load_eigenform(path) == data

    @pytest.mark.parametrize("payload,message", [
        ({"weight_2k": 12, "ap": {"4": 1}}, "not a prime"),
        ({"weight_2k": 12}, "ap"),
        ({"weight_2k": 12, "ap": {"2": 10 ** 9}}, "Deligne"),
    ])
    def test_invalid_files(self, temp_output_dir, payload, message):
        """Bad keys, missing sections and out-of-bound values."""
        path = temp_output_dir / "bad.json"
        path.write_text(json.dumps(payload), encoding="utf-8")
        with pytest.raises(EigenformDataError, match=message):
            load_eigenform(path)

    def test_broken_json(self, temp_output_dir):
        """Parse errors carry line and column."""
        path = temp_output_dir / "broken.json"
        path.write_text("{\n  \"weight_2k\": 12,\n  \"ap\": {\n", encoding="utf-8")
        with pytest.raises(EigenformDataError, match="line 4"):
            load_eigenform(path)

    def test_builtin_without_bundled_file(self, monkeypatch, temp_output_dir):
        """The oracle stands in for a missing file."""
        monkeypatch.setattr(config, "DELTA_EIGENFORM_FILE", temp_output_dir / "absent.json")
        data = builtin_delta(13)
        assert data.ap_values == {2: -24, 3: 252, 5: 4830, 7: -16744, 11: 534612, 13: -577738}

    def test_builtin_prefers_bundled_file(self, monkeypatch, temp_output_dir):
        """A covering file is read and cut to max_prime."""
        path = save_eigenform(EigenformData(12, {2: -24, 3: 252, 5: 4830}, "delta"), temp_output_dir / "d.json")
        monkeypatch.setattr(config, "DELTA_EIGENFORM_FILE", path)
        assert builtin_delta(3).ap_values == {2: -24, 3: 252}


class TestParity:
    """Lift existence."""

    def test_parity_warning(self, caplog):
        """Mismatched parity warns but does not raise."""
        with caplog.at_level(logging.WARNING):
            assert check_lift_parity(2, 5) is False
        assert "parity" in caplog.text
        assert check_lift_parity(2, 6) is True
