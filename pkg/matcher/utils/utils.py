import time
import functools
import numpy as np


def get_prng(seed):
    return np.random.RandomState(seed)


def timed(fn):
    """Wrap fn so that it returns (result, elapsed_seconds)."""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        return result, time.perf_counter() - start
    return wrapper


def iter_bits(mask: int):
    # lowest bit first
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def popcount(mask: int) -> int:
    return bin(mask).count("1")
