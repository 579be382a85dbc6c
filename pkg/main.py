#!/usr/bin/env python3
"""
IkedaSigns - Signs of Hecke eigenvalues of Ikeda lifts
Main application entry point.
"""

import sys
import logging
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

import config


# Configure logging
def setup_logging(level=None):
    """Set up logging configuration."""
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    # Create logs directory
    log_file = Path(getattr(config, "LOG_FILE_PATH", project_root / "logs" / "ikeda_signs.log"))
    log_file.parent.mkdir(exist_ok=True)

    logging.basicConfig(
        level=level or getattr(logging, getattr(config, "LOG_LEVEL", "INFO")),
        format=log_format,
        handlers=[
            logging.StreamHandler(),
            logging.FileHandler(log_file)
        ]
    )


logger = logging.getLogger(__name__)


def check_requirements():
    """Check if all required dependencies are available."""
    if sys.version_info < (3, 8):
        return False, "Python 3.8 or higher is required"

    required_packages = ['numpy', 'sympy', 'mpmath', 'tqdm']
    missing_packages = []
    for package in required_packages:
        try:
            __import__(package)
        except ImportError:
            missing_packages.append(package)

    if missing_packages:
        return False, f"Missing packages: {', '.join(missing_packages)}\n" \
                      f"Install with: pip install {' '.join(missing_packages)}"
    return True, "All requirements satisfied"


def main(argv=None):
    """Main application entry point."""
    setup_logging()
    logger.debug(f"Python version: {sys.version}")
    logger.debug(f"Project root: {project_root}")

    try:
        requirements_ok, requirements_message = check_requirements()
        if not requirements_ok:
            logger.error(f"Requirements check failed: {requirements_message}")
            return 2

        from cli import dispatch

        exit_code = dispatch(argv)
        logger.debug(f"Exiting with code: {exit_code}")
        return exit_code

    except ImportError as e:
        logger.error(f"Import error: {e}")
        logger.error("Please install dependencies: pip install -r requirements.txt")
        return 2
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
