"""Order-autonomous sets, the maximal-autonomous partition, and NTMA points.

A set A is order-autonomous when every outside point comparable to part of A
is comparable in the same direction to all of A.  For a connected and
coconnected poset the maximal proper order-autonomous sets partition the
ground set; the quotient on the blocks is the index poset T.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Poset, bits, popcount
from .errors import (
    EmptySetError,
    NotCoconnectedError,
    NotConnectedError,
    StructureError,
)


def is_order_autonomous(p: Poset, a_mask: int) -> bool:
    if not a_mask:
        raise EmptySetError("autonomy of the empty set")
    for x in range(p.n):
        bit = 1 << x
        if bit & a_mask:
            continue
        above = p.dn[x] & a_mask   # members of A below x
        below = p.up[x] & a_mask   # members of A above x
        if above and above != a_mask:
            return False
        if below and below != a_mask:
            return False
        if above and below:
            return False
    return True


def autonomous_sets(p: Poset, proper: bool = True, nontrivial: bool = False) -> list[int]:
    """All order-autonomous subsets by exhaustive search (desk scale, n <= 16)."""
    out = []
    full = p.full_mask
    for mask in range(1, full + 1):
        if proper and mask == full:
            continue
        if nontrivial and popcount(mask) < 2:
            continue
        if is_order_autonomous(p, mask):
            out.append(mask)
    return out


def _splitter(p: Poset, x: int, a_mask: int) -> bool:
    """True iff x (outside A) is comparable to part of A but not uniformly."""
    above = p.dn[x] & a_mask
    below = p.up[x] & a_mask
    if above and below:
        return True
    return (above and above != a_mask) or (below and below != a_mask)


def module_closure(p: Poset, seed_mask: int) -> int:
    """Smallest order-autonomous set containing the seed.

    Any autonomous superset of A must absorb every outside splitter of A, so
    iterating absorption reaches the minimum.  Polynomial, usable far beyond
    the exhaustive-search size range.
    """
    if not seed_mask:
        raise EmptySetError("closure of the empty set")
    a = seed_mask
    changed = True
    while changed:
        changed = False
        for x in range(p.n):
            if not (a >> x) & 1 and _splitter(p, x, a):
                a |= 1 << x
                changed = True
    return a


def _max_proper_module_at(p: Poset, e: int) -> int:
    """Union of all proper autonomous sets containing e.

    For connected coconnected P every proper autonomous set lies inside a
    unique maximal one, and autonomous sets sharing a point union into an
    autonomous set, so this union is exactly e's maximal block.
    """
    u = 1 << e
    for y in range(p.n):
        if y == e:
            continue
        c = module_closure(p, (1 << e) | (1 << y))
        if c != p.full_mask:
            u |= c
    return u


@dataclass(frozen=True)
class AutonomousDecomposition:
    blocks: tuple[int, ...]          # masks of the maximal order-autonomous sets
    index_poset: Poset               # T, on block indices
    block_of: tuple[int, ...]        # element -> block index


def maximal_autonomous_partition(p: Poset) -> AutonomousDecomposition:
    """Canonical partition into maximal proper order-autonomous sets.

    Defined for connected coconnected posets with at least 2 elements; the
    blocks are pairwise disjoint and cover the ground set.
    """
    if not p.is_connected():
        raise NotConnectedError("canonical decomposition needs a connected poset")
    if not p.is_coconnected():
        raise NotCoconnectedError("canonical decomposition needs a coconnected poset")
    if p.n < 2:
        raise StructureError("no proper decomposition of a singleton")
    maximal = []
    covered = 0
    for e in range(p.n):
        if covered & (1 << e):
            continue
        m = _max_proper_module_at(p, e)
        if covered & m:
            raise StructureError("maximal autonomous sets overlap; input not prime")
        covered |= m
        maximal.append(m)
    if covered != p.full_mask:
        raise StructureError("maximal autonomous sets fail to cover")
    blocks = tuple(sorted(maximal, key=lambda m: m & -m))
    block_of = [0] * p.n
    for i, m in enumerate(blocks):
        for x in bits(m):
            block_of[x] = i
    up = []
    for i, m in enumerate(blocks):
        rep = (m & -m).bit_length() - 1
        row = 0
        for j, o in enumerate(blocks):
            if i == j:
                continue
            other = (o & -o).bit_length() - 1
            if p.lt(rep, other):
                row |= 1 << j
        up.append(row)
    return AutonomousDecomposition(blocks, Poset(len(blocks), up), tuple(block_of))


def is_decomposable(p: Poset) -> bool:
    """True iff P has a proper order-autonomous subset with at least 2 elements."""
    return bool(ntma_points(p))


def ntma_points(p: Poset) -> int:
    """Mask of points lying in some nontrivial proper order-autonomous subset.

    x qualifies iff the closure of some pair {x, y} stays proper, because
    every qualifying set contains such a pair closure and every proper pair
    closure qualifies.
    """
    out = 0
    full = p.full_mask
    for x in range(p.n):
        if (out >> x) & 1:
            continue
        for y in range(p.n):
            if y == x:
                continue
            c = module_closure(p, (1 << x) | (1 << y))
            if c != full:
                out |= c
    return out
