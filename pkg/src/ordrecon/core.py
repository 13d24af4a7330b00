"""Immutable finite posets as dense bit matrices, plus elementary order queries.

Elements are the integers 0..n-1.  The strict relation is stored row-wise:
``up[x]`` is the bitmask of all y with x < y.  All set-valued results are
bitmasks over the ground set.  Chain "length" is always edge count, so a
chain of length k has k+1 elements.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

from .errors import CycleError, EmptySetError, NotConnectedError

FULL_VALIDATION = True


def bits(mask: int):
    """Iterate the set bit positions of a mask, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(elements) -> int:
    out = 0
    for e in elements:
        out |= 1 << e
    return out


def popcount(mask: int) -> int:
    return mask.bit_count()


def transitive_closure(n: int, up: list[int]) -> list[int]:
    """Warshall closure on bit rows; does not check acyclicity."""
    up = list(up)
    for k in range(n):
        row_k = up[k]
        bit_k = 1 << k
        for x in range(n):
            if up[x] & bit_k:
                up[x] |= row_k
    return up


class Poset:
    """An immutable strict partial order on {0, .., n-1}.

    ``up[x]`` holds y-bits with x < y; ``dn[x]`` holds y-bits with y < x.
    The relation is validated to be irreflexive, transitive and antisymmetric
    at construction time.
    """

    __slots__ = ("n", "up", "dn", "_hash")

    def __init__(self, n: int, up) -> None:
        up = tuple(up)
        if len(up) != n:
            raise ValueError(f"expected {n} rows, got {len(up)}")
        self.n = n
        self.up = up
        self.dn = tuple(self._columns(n, up))
        self._hash = hash((n, up))
        if FULL_VALIDATION:
            self._validate()

    @staticmethod
    def _columns(n: int, up) -> list[int]:
        dn = [0] * n
        for x in range(n):
            row = up[x]
            bit_x = 1 << x
            for y in bits(row):
                dn[y] |= bit_x
        return dn

    def _validate(self) -> None:
        n, up = self.n, self.up
        full = (1 << n) - 1
        for x in range(n):
            row = up[x]
            if row >> n:
                raise ValueError(f"row {x} has bits outside 0..{n - 1}")
            if row & (1 << x):
                raise CycleError(f"irreflexivity violated at {x}")
            for y in bits(row):
                if up[y] & (1 << x):
                    raise CycleError(f"antisymmetry violated on ({x},{y})")
                if up[y] & ~row & full:
                    raise ValueError(f"not transitively closed at ({x},{y})")

    # -- construction -------------------------------------------------

    @classmethod
    def from_cover_pairs(cls, n: int, covers) -> "Poset":
        """Build from (lower, upper) pairs; applies transitive closure.

        Raises CycleError when the closure would force some x < x, and
        IndexError for out-of-range labels.
        """
        up = [0] * n
        for a, b in covers:
            if not (0 <= a < n and 0 <= b < n):
                raise IndexError(f"pair ({a},{b}) out of range for n={n}")
            up[a] |= 1 << b
        up = transitive_closure(n, up)
        for x in range(n):
            if up[x] & (1 << x):
                raise CycleError(f"closure forces {x} < {x}")
        return cls(n, up)

    @classmethod
    def chain(cls, n: int) -> "Poset":
        return cls(n, [((1 << n) - 1) >> (x + 1) << (x + 1) for x in range(n)])

    @classmethod
    def antichain(cls, n: int) -> "Poset":
        return cls(n, [0] * n)

    # -- identity -----------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Poset) and self.n == other.n and self.up == other.up

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        pairs = [(x, y) for x in range(self.n) for y in bits(self.cover_up(x))]
        return f"Poset({self.n}, covers={pairs})"

    def lt(self, x: int, y: int) -> bool:
        return bool(self.up[x] & (1 << y))

    def leq(self, x: int, y: int) -> bool:
        return x == y or self.lt(x, y)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    # -- covers ---------------------------------------------------------

    def cover_up(self, x: int) -> int:
        """Mask of upper covers of x (y > x with nothing strictly between)."""
        above = self.up[x]
        out = above
        for y in bits(above):
            out &= ~self.up[y]
        return out

    def cover_dn(self, x: int) -> int:
        below = self.dn[x]
        out = below
        for y in bits(below):
            out &= ~self.dn[y]
        return out

    # -- extremal elements and ranks ------------------------------------

    def minimals(self) -> int:
        return mask_of(x for x in range(self.n) if not self.dn[x])

    def maximals(self) -> int:
        return mask_of(x for x in range(self.n) if not self.up[x])

    def extremal_sets(self) -> tuple[int, int, int]:
        lo, hi = self.minimals(), self.maximals()
        return lo, hi, lo | hi

    def rank_profile(self) -> tuple[tuple[int, ...], tuple[int, ...], int]:
        """Per-element (rank, dual_rank) plus height.

        rank(x) is the edge length of the longest chain from a minimal
        element up to x; dual_rank dually; height = max rank.
        """
        n = self.n
        order = sorted(range(n), key=lambda x: popcount(self.dn[x]))
        rank = [0] * n
        for x in order:
            below = self.dn[x]
            if below:
                rank[x] = 1 + max(rank[y] for y in bits(below))
        dual = [0] * n
        for x in reversed(order):
            above = self.up[x]
            if above:
                dual[x] = 1 + max(dual[y] for y in bits(above))
        height = max(rank) if n else 0
        return tuple(rank), tuple(dual), height

    def ranks(self) -> tuple[int, ...]:
        return self.rank_profile()[0]

    def height(self) -> int:
        return self.rank_profile()[2]

    def longest_chain_through(self, x: int) -> int:
        """Edge length of the longest chain containing x."""
        rank, dual, _ = self.rank_profile()
        return rank[x] + dual[x]

    # -- down/up sets and neighborhoods ----------------------------------

    def down_set(self, x: int) -> int:
        """Reflexive down set of x as a mask."""
        return self.dn[x] | (1 << x)

    def up_set(self, x: int) -> int:
        return self.up[x] | (1 << x)

    def neighborhood(self, a_mask: int) -> int:
        """All points comparable (<= or >=) to some point of A, including A."""
        if not a_mask:
            raise EmptySetError("neighborhood of the empty set")
        out = a_mask
        for a in bits(a_mask):
            out |= self.up[a] | self.dn[a]
        return out

    def ideal_size_sequence(self) -> tuple[int, ...]:
        return tuple(sorted(popcount(self.down_set(x)) for x in range(self.n)))

    def filter_size_sequence(self) -> tuple[int, ...]:
        return tuple(sorted(popcount(self.up_set(x)) for x in range(self.n)))

    # -- connectivity -----------------------------------------------------

    def comparability(self, x: int) -> int:
        return self.up[x] | self.dn[x]

    def components(self) -> list[int]:
        """Connected components of the comparability graph, as masks.

        Sorted by least element.
        """
        seen = 0
        out = []
        for start in range(self.n):
            if seen & (1 << start):
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                grown = comp
                for x in bits(frontier):
                    grown |= self.comparability(x)
                frontier = grown & ~comp
                comp = grown
            seen |= comp
            out.append(comp)
        return out

    def components_within(self, s_mask: int) -> list[int]:
        """Components of the subposet induced on s_mask, as masks in P's labels."""
        seen = 0
        out = []
        for start in bits(s_mask):
            if seen & (1 << start):
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                grown = comp
                for x in bits(frontier):
                    grown |= self.comparability(x) & s_mask
                frontier = grown & ~comp
                comp = grown
            seen |= comp
            out.append(comp)
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    # -- linear sums --------------------------------------------------------

    def linear_summands(self) -> list["Poset"]:
        """Maximal decomposition P = S_1 + S_2 + ... (+ is linear sum).

        The summands are the connected components of the incomparability
        graph, which are totally ordered bottom to top; k = 1 iff P is
        coconnected.
        """
        masks = self._summand_masks()
        return [self.induced(m) for m in masks]

    def _summand_masks(self) -> list[int]:
        n = self.n
        if n == 0:
            return []
        incomp = [self.full_mask & ~(self.comparability(x) | (1 << x)) for x in range(n)]
        seen = 0
        comps = []
        for start in range(n):
            if seen & (1 << start):
                continue
            comp = 1 << start
            frontier = comp
            while frontier:
                grown = comp
                for x in bits(frontier):
                    grown |= incomp[x]
                frontier = grown & ~comp
                comp = grown
            seen |= comp
            comps.append(comp)
        ranks = self.ranks()
        comps.sort(key=lambda m: min(ranks[x] for x in bits(m)))
        return comps

    def is_coconnected(self) -> bool:
        return len(self._summand_masks()) <= 1

    # -- derived posets -----------------------------------------------------

    def dual(self) -> "Poset":
        return Poset(self.n, self.dn)

    def induced(self, s_mask: int) -> "Poset":
        """Subposet on the elements of s_mask, labels compacted in index order."""
        if not s_mask:
            raise EmptySetError("induced subposet on the empty set")
        keep = list(bits(s_mask))
        index = {e: i for i, e in enumerate(keep)}
        up = []
        for e in keep:
            row = 0
            for y in bits(self.up[e] & s_mask):
                row |= 1 << index[y]
            up.append(row)
        return Poset(len(keep), up)

    def delete(self, x: int) -> "Poset":
        rest = self.full_mask & ~(1 << x)
        return self.induced(rest) if rest else Poset(0, [])

    def add_point(self, dn_mask: int, up_mask: int) -> "Poset":
        """Extend by a new greatest-labeled point z with z > dn_mask, z < up_mask.

        dn_mask must be a down-closed set, up_mask an up-closed set, disjoint,
        with every point of dn_mask below every point of up_mask; the result
        is then already transitively closed.
        """
        z = self.n
        up = [row | ((1 << z) if (dn_mask >> x) & 1 else 0) for x, row in enumerate(self.up)]
        up.append(up_mask)
        return Poset(z + 1, up)

    # -- width, irreducibility, dismantlability ------------------------------

    def width(self) -> int:
        """Maximum antichain size (brute-force search with pruning)."""
        n = self.n
        if n == 0:
            return 0
        best = 1

        def grow(chosen_count: int, allowed: int, start: int) -> None:
            nonlocal best
            if chosen_count + popcount(allowed & (self.full_mask >> start << start)) <= best:
                return
            for x in range(start, n):
                if allowed & (1 << x):
                    if chosen_count + 1 > best:
                        best = chosen_count + 1
                    grow(chosen_count + 1, allowed & ~self.comparability(x) & ~(1 << x), x + 1)

        grow(0, self.full_mask, 0)
        return best

    def is_irreducible(self, x: int) -> bool:
        """True iff x has a unique upper cover or a unique lower cover."""
        return popcount(self.cover_up(x)) == 1 or popcount(self.cover_dn(x)) == 1

    def is_dismantlable(self) -> bool:
        """True iff some elimination order removes an irreducible point each step.

        Backtracking memoized on the canonical certificate, since confluence of
        irreducible elimination is not assumed.
        """
        from .canonical import canonical_cert

        return _dismantlable_by_cert(canonical_cert(self))

    # -- cutpoints -------------------------------------------------------------

    def cutpoint_queries(self, c: int) -> tuple[bool, list["Poset"]]:
        """(is c a cutpoint, components of K minus c where K is c's component)."""
        comp = next(m for m in self.components() if m & (1 << c))
        rest = comp & ~(1 << c)
        pieces = self.components_within(rest) if rest else []
        without = len(self.components()) - 1 + len(pieces)
        return without > len(self.components()), [self.induced(m) for m in pieces]


def linear_sum(a: Poset, b: Poset) -> Poset:
    """A below B with all cross-comparabilities; B's labels shifted up by |A|."""
    n = a.n + b.n
    hi = ((1 << n) - 1) ^ ((1 << a.n) - 1)
    up = [row | hi for row in a.up]
    up.extend(row << a.n for row in b.up)
    return Poset(n, up)


def linear_sum_all(parts) -> Poset:
    parts = list(parts)
    if not parts:
        raise EmptySetError("linear sum of no parts")
    out = parts[0]
    for p in parts[1:]:
        out = linear_sum(out, p)
    return out


def disjoint_union(a: Poset, b: Poset) -> Poset:
    up = list(a.up)
    up.extend(row << a.n for row in b.up)
    return Poset(a.n + b.n, up)


@lru_cache(maxsize=200_000)
def _dismantlable_by_cert(cert) -> bool:
    from .canonical import canonical_cert, cert_to_poset

    p = cert_to_poset(cert)
    if p.n <= 1:
        return True
    tried = set()
    for x in range(p.n):
        if not p.is_irreducible(x):
            continue
        sub = canonical_cert(p.delete(x))
        if sub in tried:
            continue
        tried.add(sub)
        if _dismantlable_by_cert(sub):
            return True
    return False


def all_chains(p: Poset):
    """Yield every nonempty chain of P as a tuple of elements, ascending."""

    def extend(prefix: tuple, above: int):
        yield prefix
        for y in bits(above):
            yield from extend(prefix + (y,), above & p.up[y])

    for x in range(p.n):
        yield from extend((x,), p.up[x])


def count_chains_of_length(p: Poset, edge_length: int) -> int:
    """Number of chains with edge_length edges (edge_length+1 elements)."""
    k = edge_length + 1
    if k <= 0 or k > p.n:
        return 0
    total = 0
    for subset in combinations(range(p.n), k):
        ok = all(p.lt(subset[i], subset[j]) or p.lt(subset[j], subset[i])
                 for i in range(k) for j in range(i + 1, k))
        if ok:
            total += 1
    return total


# -- text format ---------------------------------------------------------------

def parse_poset_text(text: str) -> Poset:
    """Parse the text format: first line n, then one `a<b` cover pair per line.

    Blank lines and `#` comments are allowed.  The closure is applied and
    validated.
    """
    lines = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    if not lines:
        raise ValueError("empty poset text")
    n = int(lines[0])
    covers = []
    for line in lines[1:]:
        a, _, b = line.partition("<")
        if not _:
            raise ValueError(f"expected 'a<b', got {line!r}")
        covers.append((int(a.strip()), int(b.strip())))
    return Poset.from_cover_pairs(n, covers)


def format_poset_text(p: Poset) -> str:
    lines = [str(p.n)]
    for x in range(p.n):
        for y in bits(p.cover_up(x)):
            lines.append(f"{x}<{y}")
    return "\n".join(lines) + "\n"
