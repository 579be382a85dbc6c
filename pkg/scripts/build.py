#!/usr/bin/env python3
"""
Unified build script for IkedaSigns.
Handles installation, data generation, testing and the identity suite.
"""

import sys
import subprocess
import argparse
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent


def run_command(cmd, description=""):
    """Run a command and return success status."""
    if description:
        print(f"[INFO] {description}")

    print(f"[CMD] {' '.join(cmd)}")
    try:
        subprocess.run(cmd, check=True, cwd=PROJECT_ROOT)
        return True
    except subprocess.CalledProcessError as e:
        print(f"[ERROR] Command failed: {e}")
        return False


def install_dependencies(dev=False):
    """Install Python dependencies."""
    requirements = "requirements-dev.txt" if dev else "requirements.txt"
    return run_command([
        sys.executable, "-m", "pip", "install",
        "-r", requirements
    ], "Installing dependencies")


def generate_data(max_prime=997):
    """Write data/delta.json from the tau oracle."""
    sys.path.insert(0, str(PROJECT_ROOT))
    import config
    from ingest import EigenformData, save_eigenform, tau_oracle
    import sympy

    print(f"[INFO] Generating Delta eigenvalues up to p = {max_prime}")
    tau = tau_oracle(max_prime)
    data = EigenformData(12, {p: tau[p - 1] for p in sympy.primerange(2, max_prime + 1)}, "delta")
    save_eigenform(data, config.DELTA_EIGENFORM_FILE)
    return True


def run_tests():
    """Run test suite."""
    return run_command([
        sys.executable, "run_tests.py", "--quick"
    ], "Running tests")


def run_selftest():
    """Run the identity suite."""
    return run_command([sys.executable, "main.py", "selftest"], "Running selftest")


def main():
    parser = argparse.ArgumentParser(description="IkedaSigns Build Tool")
    parser.add_argument("command", choices=[
        "setup", "install", "dev-install", "data", "test", "selftest"
    ], help="Command to execute")
    parser.add_argument("--max-prime", type=int, default=997,
                        help="Largest prime written by the data command")

    args = parser.parse_args()

    if args.command == "setup":
        print("=== IkedaSigns Setup ===")
        success = (
            install_dependencies() and
            generate_data(args.max_prime) and
            run_tests()
        )
        if success:
            print("Setup complete! Run: python main.py selftest")
            return 0
        print("Setup failed!")
        return 1

    elif args.command == "install":
        return 0 if install_dependencies() else 1

    elif args.command == "dev-install":
        return 0 if install_dependencies(dev=True) else 1

    elif args.command == "data":
        return 0 if generate_data(args.max_prime) else 1

    elif args.command == "test":
        return 0 if run_tests() else 1

    elif args.command == "selftest":
        return 0 if run_selftest() else 1


if __name__ == "__main__":
    sys.exit(main())
