import pytest
import json
from pathlib import Path
import tempfile
import shutil
import sys

# Add project root to path
PROJECT_ROOT = Path(__file__).parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import config


@pytest.fixture(scope="session")
def genus4_Q():
    """Closed-form genus-4 spin Q at generic a and k."""
    from lfactor import genus4_Q_closed
    poly, _ = genus4_Q_closed()
    return poly


@pytest.fixture(scope="session")
def sk_Q():
    """Spin Q of the Saito-Kurokawa lift at generic k."""
    from lfactor import sk_lift_Q
    return sk_lift_Q()


@pytest.fixture(scope="session")
def appendix_data():
    """Raw residue table."""
    with open(config.APPENDIX_DATA_FILE, "r", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def synthetic_numerator():
    """Genus-4 numerator data with e_0 = 1 and two made-up higher terms."""
    from exactalg import LaurentAQ
    from series import NumeratorData
    return NumeratorData(
        4,
        (
            LaurentAQ.one(),
            LaurentAQ(),
            LaurentAQ.monomial(-1, 0, (-4, 8)),
            LaurentAQ.monomial(2, 1, (-6, 12)) + LaurentAQ.monomial(2, -1, (-6, 12)),
        ),
        provenance="test fixture",
    )


@pytest.fixture(scope="session")
def genus4_numerator():
    """External genus-4 numerator data; tests using it skip when it is absent."""
    from series import NumeratorDataRequired, load_numerator
    try:
        return load_numerator()
    except NumeratorDataRequired as e:
        pytest.skip(f"Genus-4 numerator data not available: {e}")


@pytest.fixture
def temp_output_dir():
    """Create temporary output directory."""
    temp_dir = Path(tempfile.mkdtemp(prefix="ikeda_test_"))
    yield temp_dir
    shutil.rmtree(temp_dir, ignore_errors=True)


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    """No progress bars in test output."""
    monkeypatch.setattr(config, "SHOW_PROGRESS", False)


# Pytest configuration
def pytest_configure(config):
    """Configure pytest settings."""
    config.addinivalue_line("markers", "slow: marks tests as slow (deselect with '-m \"not slow\"')")
    config.addinivalue_line("markers", "integration: marks tests as integration tests")
    config.addinivalue_line("markers", "unit: marks tests as unit tests")
    config.addinivalue_line("markers", "needs_data: needs the external genus-4 numerator file")


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically."""
    for item in items:
        # Mark slow tests
        if "scan" in item.name.lower() or "full" in item.name.lower():
            item.add_marker(pytest.mark.slow)

        # Mark integration tests
        if "cli" in item.name.lower() or "pipeline" in item.name.lower():
            item.add_marker(pytest.mark.integration)

        if "genus4_numerator" in getattr(item, "fixturenames", ()):
            item.add_marker(pytest.mark.needs_data)
