"""
Eigenform data: the Ramanujan tau oracle, Satake parameters and JSON files.

An elliptic eigenform of weight 2k is given by its Hecke eigenvalues a(p)
at primes. The unitarized Satake parameter u = a + 1/a = a(p)/p**((2k-1)/2)
is kept exact in Q(sqrt(p)).
"""

import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np
import sympy

import config
from utils.numeric import unit_from_u
from utils.surd import Surd

logger = logging.getLogger(__name__)


class EigenformDataError(ValueError):
    """Eigenform data that cannot be read or violates the Deligne bound."""


@dataclass(frozen=True)
class EigenformData:
    """Hecke eigenvalues a(p) of a weight-2k elliptic eigenform."""

    weight_2k: int
    ap_values: Dict[int, int]
    label: str = ""

    def __post_init__(self):
        if self.weight_2k < 12 or self.weight_2k % 2:
            raise EigenformDataError(f"Weight 2k must be an even integer >= 12, got {self.weight_2k}")
        for p, ap in self.ap_values.items():
            if not sympy.isprime(p):
                raise EigenformDataError(f"Key {p} is not a prime")
            if ap * ap > 4 * p ** (self.weight_2k - 1):
                raise EigenformDataError(
                    f"a({p}) = {ap} violates the Deligne bound |a(p)| <= 2*p**{self.weight_2k - 1}/2"
                )

    @property
    def k(self) -> int:
        return self.weight_2k // 2

    @property
    def primes(self) -> List[int]:
        return sorted(self.ap_values)


@dataclass(frozen=True)
class SatakeU:
    p: int
    u: Surd

    @property
    def a(self):
        """Unit-circle Satake parameter in the upper half plane."""
        return unit_from_u(self.u)

    def decimal(self, digits: Optional[int] = None) -> str:
        return self.u.decimal(digits or getattr(config, "DECIMAL_DIGITS", 30))


def _jacobi_cube(size: int) -> np.ndarray:
    """prod (1 - q**n)**3 = sum (-1)**m (2m+1) q**(m(m+1)/2), to q**(size-1)."""
    series = np.zeros(size, dtype=object)
    m = 0
    while m * (m + 1) // 2 < size:
        series[m * (m + 1) // 2] = (-1) ** m * (2 * m + 1)
        m += 1
    return series


def tau_oracle(N: int) -> List[int]:
    """
    tau(1..N) from q * prod (1 - q**n)**24.

    The eta cube is sparse, so the eighth power is built by seven
    sparse-times-dense products on object arrays of Python integers.
    """
    ceiling = getattr(config, "TAU_ORACLE_MAX", 100000)
    if N < 1 or N > ceiling:
        raise ValueError(f"N must lie in 1..{ceiling}, got {N}")
    cube = _jacobi_cube(N)
    sparse = [(i, c) for i, c in enumerate(cube) if c]
    power = cube.copy()
    for _ in range(7):
        product = np.zeros(N, dtype=object)
        for offset, coeff in sparse:
            product[offset:] += coeff * power[: N - offset]
        power = product
    logger.debug(f"Computed tau(1..{N})")
    # q * f(q): tau(n) is the q**(n-1) coefficient of the product
    return [int(c) for c in power]


def satake_u(data: EigenformData, p: int) -> SatakeU:
    """u = a(p) * sqrt(p) / p**k, exact in Q(sqrt(p))."""
    if p not in data.ap_values:
        raise EigenformDataError(f"No eigenvalue for p = {p} in {data.label or 'eigenform data'}")
    u = Surd(0, Fraction(data.ap_values[p], p ** data.k), p)
    if u < -2 or u > 2:
        raise EigenformDataError(f"u = {u} at p = {p} lies outside [-2, 2]")
    return SatakeU(p, u)


def satake_table(data: EigenformData, primes: Optional[List[int]] = None) -> Dict[int, Surd]:
    """u for every requested prime, for use as per-prime scan points."""
    return {p: satake_u(data, p).u for p in (primes or data.primes)}


def load_eigenform(path: Union[str, Path]) -> EigenformData:
    """
    Read {"weight_2k": K, "label": s, "ap": {"2": v, ...}}.

    Raises:
        EigenformDataError: unreadable JSON, non-prime key or Deligne violation
    """
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except json.JSONDecodeError as e:
        raise EigenformDataError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    try:
        ap_values = {int(p): int(v) for p, v in raw["ap"].items()}
        data = EigenformData(int(raw["weight_2k"]), ap_values, str(raw.get("label", path.stem)))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, EigenformDataError):
            raise
        raise EigenformDataError(f"{path}: {e}") from e
    logger.info(f"Loaded {data.label}: weight {data.weight_2k}, {len(ap_values)} primes")
    return data


def save_eigenform(data: EigenformData, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "weight_2k": data.weight_2k,
        "label": data.label,
        "ap": {str(p): data.ap_values[p] for p in data.primes},
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2)
        f.write("\n")
    logger.info(f"Saved {data.label} to {path}")
    return path


def builtin_delta(max_prime: Optional[int] = None) -> EigenformData:
    """
    The discriminant form Delta (weight 12).

    Read from the bundled file when it covers max_prime, otherwise
    recomputed with tau_oracle.
    """
    max_prime = max_prime or getattr(config, "DEFAULT_PRIME_HI", 997)
    bundled = Path(getattr(config, "DELTA_EIGENFORM_FILE"))
    if bundled.exists():
        data = load_eigenform(bundled)
        if data.primes and data.primes[-1] >= sympy.prevprime(max_prime + 1):
            return EigenformData(12, {p: v for p, v in data.ap_values.items() if p <= max_prime}, "delta")
    tau = tau_oracle(max_prime)
    ap_values = {p: tau[p - 1] for p in sympy.primerange(2, max_prime + 1)}
    return EigenformData(12, ap_values, "delta")


def check_lift_parity(n: int, k: int) -> bool:
    """The genus-2n lift of a weight-2k form exists only when n = k (mod 2)."""
    ok = (n - k) % 2 == 0
    if not ok:
        logger.warning(f"n = {n} and k = {k} differ in parity: no Ikeda lift exists; computing formally")
    return ok
