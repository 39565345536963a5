"""Perfect matchings on the positive support of a square matrix."""

from typing import List, Optional

import numpy as np


def support_permutation(residual: np.ndarray, floor: float = 0.0) -> Optional[List[int]]:
    """Permutation ``perm`` with ``residual[i, perm[i]] > floor`` for all i.

    Kuhn's augmenting-path matching; rows are matched in index order and each
    row tries its columns by descending residual (stable on ties), so the
    result is deterministic. Returns None when no such permutation exists.
    """
    n = residual.shape[0]
    order = [
        [int(j) for j in np.argsort(-residual[i], kind="stable") if residual[i, j] > floor]
        for i in range(n)
    ]
    owner = [-1] * n

    def augment(i: int, seen: List[bool]) -> bool:
        for j in order[i]:
            if seen[j]:
                continue
            seen[j] = True
            if owner[j] < 0 or augment(owner[j], seen):
                owner[j] = i
                return True
        return False

    for i in range(n):
        if not augment(i, [False] * n):
            return None
    perm = [0] * n
    for j, i in enumerate(owner):
        perm[i] = j
    return perm
