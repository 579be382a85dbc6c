import pytest
import sys
from functools import partial
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from utils.parallel import parallel_map


class TestParallelMap:
    """Order-preserving map over worker processes."""

    @pytest.mark.parametrize("workers", [1, 3])
    def test_order_preserved(self, workers):
        """Results come back in input order."""
        assert parallel_map(partial(pow, 2), range(12), workers, progress=False) == [2 ** i for i in range(12)]

    def test_single_item_runs_inline(self):
        """Unpicklable functions are fine on the serial path."""
        assert parallel_map(lambda x: x + 1, [1], workers=4, progress=False) == [2]

    def test_worker_error_propagates(self):
        """An exception in a worker reaches the caller."""
        with pytest.raises(ZeroDivisionError):
            parallel_map(partial(divmod, 1), [1, 0, 2], workers=2, progress=False)
