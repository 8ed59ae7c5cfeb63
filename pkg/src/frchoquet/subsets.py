"""Attribute subsets encoded as integer bitmasks.

Bit ``i`` set means attribute ``i`` is a member. Python ints give O(1)
membership tests and canonical equality for free.
"""

from itertools import combinations


def to_mask(subset, n=None):
    """Encode an iterable of attribute indices (or pass through an int mask)."""
    if isinstance(subset, (int,)) and not isinstance(subset, bool):
        mask = subset
        if mask < 0:
            raise ValueError(f"negative subset mask {mask}")
    else:
        mask = 0
        for i in subset:
            i = int(i)
            if i < 0:
                raise IndexError(f"attribute index {i} out of range")
            mask |= 1 << i
    if n is not None and mask >> n:
        raise IndexError(f"subset {mask:#b} has members beyond {n} attributes")
    return mask


def members(mask):
    """Sorted list of attribute indices in ``mask``."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(n):
    return (1 << n) - 1


def size(mask):
    return mask.bit_count()


def contains(mask, i):
    return bool(mask >> i & 1)


def iter_submasks(mask):
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def iter_all(n):
    """Every subset of ``n`` attributes, ordered by size then lexicographically."""
    for r in range(n + 1):
        for combo in combinations(range(n), r):
            yield to_mask(combo)


def immediate_submasks(mask):
    """Masks obtained by removing exactly one member."""
    m = mask
    while m:
        low = m & -m
        yield mask ^ low
        m ^= low
