"""Integer partition and composition combinatorics.

Partitions are plain tuples of weakly decreasing positive integers; the
empty partition is ().  These index the charge-zero basis of the wedge
engine and the gluing data of the splitting engine.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Sequence, Tuple

Partition = Tuple[int, ...]


def is_partition(parts: Sequence[int]) -> bool:
    return all(p > 0 for p in parts) and all(parts[i] >= parts[i + 1] for i in range(len(parts) - 1))


def partitions_of(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n with parts bounded by max_part, decreasing lex order."""
    if n < 0:
        return
    if n == 0:
        yield ()
        return
    first = n if max_part is None else min(n, max_part)
    for head in range(first, 0, -1):
        for tail in partitions_of(n - head, head):
            yield (head,) + tail


def partitions_into(n: int, parts: int) -> Iterator[Partition]:
    """Partitions of n into exactly the given number of positive parts."""
    for lam in partitions_of(n):
        if len(lam) == parts:
            yield lam


@lru_cache(maxsize=None)
def partitions_upto(n: int) -> tuple:
    """All partitions of size at most n."""
    out = []
    for m in range(n + 1):
        out.extend(partitions_of(m))
    return tuple(out)


def multiplicities(lam: Sequence[int]) -> Counter:
    return Counter(lam)


def automorphism_factor(lam: Sequence[int]) -> int:
    """prod of mult! over repeated parts; converts ordered tuples to multisets."""
    out = 1
    for m in Counter(lam).values():
        out *= factorial(m)
    return out


def cycle_type_order(lam: Sequence[int]) -> int:
    """z_lambda = prod(parts) * prod(mult!), the centralizer order of the class."""
    out = automorphism_factor(lam)
    for p in lam:
        out *= p
    return out


def multinomial(ks: Sequence[int]) -> int:
    """(sum ks)! / prod(ks!)."""
    total = sum(ks)
    out = factorial(total)
    for k in ks:
        out //= factorial(k)
    return out


def compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    """All ordered tuples of non-negative integers of given length and sum."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for tail in compositions(total - head, parts - 1):
            yield (head,) + tail


def frobenius_modes(lam: Sequence[int], length: int) -> list:
    """First `length` occupied fermion modes lam_i - i + 1/2 as Fractions."""
    return [Fraction(2 * ((lam[i] if i < len(lam) else 0) - i) - 1, 2) for i in range(length)]
