"""
Configuration file for the Ikeda lift sign toolkit.

This module contains all configurable parameters for the exact symbolic
engine, the numeric sign backend and the prime scans. Adjust these values
to trade scan coverage against run time.
"""

import os
from pathlib import Path

# ============================================================================
# Application Configuration
# ============================================================================

APP_NAME = "IkedaSigns"
APP_VERSION = "1.0.0"

# Project paths
PROJECT_ROOT = Path(__file__).parent
DATA_DIR = PROJECT_ROOT / "data"
LOGS_DIR = PROJECT_ROOT / "logs"

# Create directories
LOGS_DIR.mkdir(exist_ok=True)

# ============================================================================
# Data Files
# ============================================================================

APPENDIX_DATA_FILE = DATA_DIR / "appendix_coefficients.json"
EIGENVALUE_FORMULAS_FILE = DATA_DIR / "eigenvalue_formulas.json"
DELTA_EIGENFORM_FILE = DATA_DIR / "delta.json"

# Genus-4 numerator coefficients are external data; absent by default
NUMERATOR_GENUS4_FILE = Path(
    os.environ.get("IKEDA_NUMERATOR_GENUS4", DATA_DIR / "numerator_genus4.json")
)

# ============================================================================
# Numeric Settings
# ============================================================================

# Working precision of the mpmath backend (bits of mantissa)
DEFAULT_PRECISION_BITS = int(os.environ.get("IKEDA_PRECISION_BITS", "128"))

# Bits reserved for accumulated rounding in the floating error estimate
PRECISION_MARGIN_BITS = 16

# Interval sign decisions double precision up to this many bits
MAX_PRECISION_BITS = 2048

# Highest x-power checked between partial fractions and the P/Q series
SERIES_CHECK_ORDER = 12

# Residue table numeric comparison
VERIFY_REL_TOLERANCE = 1e-25
VERIFY_PRECISION_BITS = 256
VERIFY_POINTS = 5
VERIFY_PRIMES = (5, 7, 11)
VERIFY_WEIGHTS = (6, 8)

RANDOM_SEED = 20240601

# Significant digits of decimal renderings in reports
DECIMAL_DIGITS = 30

# ============================================================================
# Scan Settings
# ============================================================================

DEFAULT_U_GRID = 101
DEFAULT_PRIME_LO = 2
DEFAULT_PRIME_HI = 997

# Worker processes for prime scans (1 = serial)
DEFAULT_WORKERS = int(os.environ.get("IKEDA_WORKERS", "1"))

SHOW_PROGRESS = True

# ============================================================================
# Limits
# ============================================================================

BETA_TABLE_MAX_N = 8
SPIN_Q_MAX_N = 3
TAU_ORACLE_MAX = 100000
THRESHOLD_PRIME_CEILING = 10**7
SERIES_MAX_ORDER = 64

# ============================================================================
# Logging Settings
# ============================================================================

LOG_LEVEL = "INFO"
LOG_FILE_PATH = LOGS_DIR / "ikeda_signs.log"
