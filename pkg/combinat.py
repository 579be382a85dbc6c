"""
Subset-sum counters over the odd numbers {1-2n, 3-2n, ..., 2n-1}.

alpha(r, j, n) counts j-element subsets with sum r; beta is the
difference alpha(r, j, n) - alpha(r, j-2, n) that appears as an exponent
in the spin L-factor product.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Mapping, Tuple

import config

logger = logging.getLogger(__name__)


def odd_set(n: int) -> Tuple[int, ...]:
    """The 2n odd integers 1-2n, 3-2n, ..., 2n-1."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return tuple(range(1 - 2 * n, 2 * n, 2))


@lru_cache(maxsize=None)
def _subset_sum_counts(n: int) -> Dict[Tuple[int, int], int]:
    """(size, sum) -> number of subsets, by dynamic programming over the elements."""
    counts: Dict[Tuple[int, int], int] = {(0, 0): 1}
    for value in odd_set(n):
        updated = dict(counts)
        for (size, total), ways in counts.items():
            key = (size + 1, total + value)
            updated[key] = updated.get(key, 0) + ways
        counts = updated
    logger.debug(f"Subset-sum table for n={n}: {len(counts)} nonzero cells")
    return counts


def alpha(r: int, j: int, n: int) -> int:
    """Number of j-element subsets of the odd set with sum r (0 outside 0 <= j <= 2n)."""
    if j < 0 or j > 2 * n:
        return 0
    return _subset_sum_counts(n).get((j, r), 0)


def alpha_bruteforce(r: int, j: int, n: int) -> int:
    """Direct enumeration of all j-subsets; the oracle for alpha."""
    if j < 0 or j > 2 * n:
        return 0
    return sum(1 for subset in combinations(odd_set(n), j) if sum(subset) == r)


def beta(r: int, j: int, n: int) -> int:
    return alpha(r, j, n) - alpha(r, j - 2, n)


def r_range(j: int, n: int) -> range:
    """Sums reachable by j-subsets: j(j-2n), j(j-2n)+2, ..., j(2n-j)."""
    return range(j * (j - 2 * n), j * (2 * n - j) + 1, 2)


@dataclass(frozen=True)
class BetaTable:
    """beta(r, j, n) for 0 <= j <= n and r over the reachable sums."""

    n: int
    entries: Mapping[Tuple[int, int], int]

    def __getitem__(self, key: Tuple[int, int]) -> int:
        r, j = key
        return self.entries.get((r, j), 0)

    def rows(self) -> Iterator[Tuple[int, int, int, int]]:
        """(j, r, alpha, beta) in increasing j then r."""
        for j in range(self.n + 1):
            for r in r_range(j, self.n):
                yield j, r, alpha(r, j, self.n), self.entries[(r, j)]

    def factor_degree(self) -> int:
        """Degree of the product of Sym^(n-j) factors raised to the beta exponents."""
        return sum((self.n - j + 1) * b for (r, j), b in self.entries.items())

    def nonzero(self) -> List[Tuple[int, int, int]]:
        return [(r, j, b) for (r, j), b in sorted(self.entries.items(), key=lambda kv: (kv[0][1], kv[0][0])) if b]


def beta_table(n: int) -> BetaTable:
    """
    Complete beta table over j in [0, n] and r in r_range(j, n).

    Args:
        n: half the genus of the lift

    Returns:
        BetaTable with every index pair present
    """
    ceiling = getattr(config, "BETA_TABLE_MAX_N", 8)
    if n < 1 or n > ceiling:
        raise ValueError(f"n must lie in 1..{ceiling}, got {n}")
    entries = {(r, j): beta(r, j, n) for j in range(n + 1) for r in r_range(j, n)}
    logger.info(f"Built beta table for n={n} with {len(entries)} entries")
    return BetaTable(n, entries)
