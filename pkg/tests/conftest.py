import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the numba kernels once so timed tests measure work, not JIT."""
    from ringbench._backend import backend_name

    if backend_name() == "numba":
        from ringbench import _kernels_numba

        _kernels_numba.warmup()
