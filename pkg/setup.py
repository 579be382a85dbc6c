#!/usr/bin/env python3
"""Setup script for IkedaSigns."""

from setuptools import setup
from pathlib import Path

# Read the README file
this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text(encoding='utf-8')

# Read requirements
requirements = []
requirements_file = this_directory / "requirements.txt"
if requirements_file.exists():
    with open(requirements_file, 'r', encoding='utf-8') as f:
        requirements = [line.strip() for line in f if line.strip() and not line.startswith('#')]

# Version
version = "1.0.0"

setup(
    name="ikeda-signs",
    version=version,
    description="Exact signs of Hecke eigenvalues of Ikeda lifts",
    long_description=long_description,
    long_description_content_type="text/markdown",
    py_modules=[
        "cli", "combinat", "config", "eigen", "exactalg", "ingest",
        "lfactor", "main", "selftest", "series",
    ],
    packages=["utils"],
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Mathematics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.0",
            "pytest-cov>=4.0",
            "pytest-xdist>=3.0",
            "hypothesis>=6.60",
            "black>=22.0",
            "flake8>=5.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "ikeda-signs=main:main",
        ],
    },
    include_package_data=True,
    data_files=[("data", ["data/appendix_coefficients.json", "data/eigenvalue_formulas.json", "data/README.md"])],
    zip_safe=False,
    keywords=[
        "modular-forms",
        "hecke-eigenvalues",
        "siegel-modular-forms",
        "l-functions",
        "exact-arithmetic",
    ],
    platforms=["Windows", "macOS", "Linux"],
)
