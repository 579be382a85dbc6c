"""Order-preserving parallel map for prime scans."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from tqdm import tqdm

import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: Optional[int] = None,
    desc: str = "scan",
    progress: Optional[bool] = None,
) -> List[R]:
    """
    Apply func to every item, returning results in input order.

    Exact scans are pure-Python arithmetic, so workers are processes.
    func and the items must pickle: a module-level function, or a
    functools.partial of one.

    Args:
        func: pure function of one item
        items: inputs
        workers: process count; 1 runs serially in this process
        desc: progress bar label
        progress: show a tqdm bar; defaults to config.SHOW_PROGRESS

    Returns:
        [func(item) for item in items]
    """
    items = list(items)
    workers = workers or getattr(config, "DEFAULT_WORKERS", 1)
    if progress is None:
        progress = getattr(config, "SHOW_PROGRESS", False)
    bar = tqdm(total=len(items), desc=desc, disable=not progress, leave=False)
    try:
        if workers <= 1 or len(items) <= 1:
            results = []
            for item in items:
                results.append(func(item))
                bar.update(1)
            return results
        workers = min(workers, len(items))
        logger.debug(f"Running {desc} over {len(items)} items with {workers} processes")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(func, item) for item in items]
            results = []
            for future in futures:
                results.append(future.result())
                bar.update(1)
            return results
    finally:
        bar.close()
