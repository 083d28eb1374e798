"""Integer sequences driving the Pringsheim-singular series.

``c_n = (n+1)! (n+1)^(n+1)`` and
``b_n = 2 (2 + c_n + (c_{n-1} + sum_{j<n} b_j^(n+1-j)))`` with the inner
parenthesis taken as 0 for ``n = 1``.  The number of digits of ``b_n``
roughly doubles per step (``b_16`` has about 5 * 10^4 digits), so anything
past n = 20 is expensive.
"""

from __future__ import annotations

import math
import threading

from ..errors import InputError

_b_cache: list[int] = []
_lock = threading.Lock()


def cseq(n: int) -> int:
    if n < 1:
        raise InputError(f"c_n is defined for n >= 1, got {n}")
    return math.factorial(n + 1) * (n + 1) ** (n + 1)


def bseq(n: int) -> int:
    """Exact ``b_n``; asserts the doubling ``b_{n+1} >= 2 b_n`` as it goes."""
    if n < 1:
        raise InputError(f"b_n is defined for n >= 1, got {n}")
    with _lock:
        while len(_b_cache) < n:
            m = len(_b_cache) + 1
            if m == 1:
                inner = 0
            else:
                inner = cseq(m - 1) + sum(_b_cache[j - 1] ** (m + 1 - j) for j in range(1, m))
            b = 2 * (2 + cseq(m) + inner)
            if _b_cache and b < 2 * _b_cache[-1]:
                raise AssertionError(f"b_{m} < 2 b_{m - 1}: tail bounds would be invalid")
            _b_cache.append(b)
        return _b_cache[n - 1]
