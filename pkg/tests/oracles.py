"""Independent reference implementations used only to cross-check metrics.

Kept deliberately naive (memoized recursion instead of the production DP
with backtrace) so the two sides cannot share a bug.
"""

from functools import lru_cache
from typing import Sequence


def edit_distance_recursive(ref: Sequence[str], hyp: Sequence[str]) -> int:
    ref = tuple(ref)
    hyp = tuple(hyp)

    @lru_cache(maxsize=None)
    def go(i: int, j: int) -> int:
        if i == len(ref):
            return len(hyp) - j
        if j == len(hyp):
            return len(ref) - i
        if ref[i] == hyp[j]:
            return go(i + 1, j + 1)
        return 1 + min(go(i + 1, j + 1), go(i + 1, j), go(i, j + 1))

    return go(0, 0)
