"""Canonical certificates, isomorphism search, and subposet copy counting.

Canonicalization is partition refinement on order invariants followed by
individualization with backtracking, choosing the labeling whose relation
matrix is lexicographically minimal.  The initial invariant puts rank first,
so every cell-respecting labeling is a linear extension and the whole
relation fits in the upper triangle of the canonical matrix.

Certificate text format: ``<n>:<hex>`` where the hex digits encode the upper
triangle read column by column — bit index of the pair (i, j), i < j, is
j*(j-1)//2 + i, and bit index 0 is the most significant bit of the hex
string.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

from .core import Poset, bits, popcount
from .errors import SizeError


@dataclass(frozen=True, order=True)
class Cert:
    """Canonical certificate; equality of certs is isomorphism of posets."""

    n: int
    bits: int = field(default=0)

    def text(self) -> str:
        width = max(1, (self.n * (self.n - 1) // 2 + 3) // 4)
        return f"{self.n}:{self.bits:0{width}x}"

    @classmethod
    def from_text(cls, s: str) -> "Cert":
        head, _, hexpart = s.partition(":")
        if not _ or not hexpart:
            raise ValueError(f"malformed certificate {s!r}")
        return cls(int(head), int(hexpart, 16))

    def __str__(self) -> str:
        return self.text()


def _pair_index(i: int, j: int) -> int:
    return j * (j - 1) // 2 + i


def _initial_colors(p: Poset) -> list[int]:
    rank, dual, _ = p.rank_profile()
    keys = [
        (rank[x], dual[x], popcount(p.dn[x]), popcount(p.up[x]),
         popcount(p.cover_dn(x)), popcount(p.cover_up(x)))
        for x in range(p.n)
    ]
    order = {k: i for i, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(p: Poset, colors: list[int]) -> list[int]:
    """Stable directed color refinement; color ids are label-independent."""
    n = p.n
    while True:
        sig = [
            (colors[x],
             tuple(sorted(colors[y] for y in bits(p.up[x]))),
             tuple(sorted(colors[y] for y in bits(p.dn[x]))))
            for x in range(n)
        ]
        remap = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [remap[s] for s in sig]
        if new == colors:
            return new
        colors = new


def _cells(colors: list[int]) -> list[list[int]]:
    by_color: dict[int, list[int]] = {}
    for x, c in enumerate(colors):
        by_color.setdefault(c, []).append(x)
    return [by_color[c] for c in sorted(by_color)]


def _prefix_columns(p: Poset, prefix: list[int]) -> tuple[int, ...]:
    """Column encodings for the positions fixed so far.

    Column j packs bits for pairs (i, j), i ascending, earlier pairs more
    significant, so tuple comparison is lexicographic on the bit string.
    """
    cols = []
    for j in range(1, len(prefix)):
        val = 0
        for i in range(j):
            val = (val << 1) | (1 if p.lt(prefix[i], prefix[j]) else 0)
        cols.append(val)
    return tuple(cols)


def _canonical_perm(p: Poset) -> list[int]:
    n = p.n
    if n == 0:
        return []
    best: dict = {"cols": None, "perm": None}

    def visit(colors: list[int]) -> None:
        cells = _cells(colors)
        prefix: list[int] = []
        branch_cell = None
        for cell in cells:
            if branch_cell is None and len(cell) == 1:
                prefix.append(cell[0])
            elif branch_cell is None:
                branch_cell = cell
        cols = _prefix_columns(p, prefix)
        if best["cols"] is not None and cols > tuple(best["cols"][: len(cols)]):
            return
        if branch_cell is None:
            if best["cols"] is None or cols < best["cols"]:
                best["cols"] = cols
                best["perm"] = prefix
            return
        tried: list[int] = []
        for x in branch_cell:
            if any(p.up[x] == p.up[t] and p.dn[x] == p.dn[t] for t in tried):
                continue  # swapping twins is an automorphism
            tried.append(x)
            child = [c * 2 + (0 if y == x else 1) for y, c in enumerate(colors)]
            child = _refine(p, _dense(child))
            visit(child)

    visit(_refine(p, _initial_colors(p)))
    return best["perm"]


def _dense(colors: list[int]) -> list[int]:
    remap = {c: i for i, c in enumerate(sorted(set(colors)))}
    return [remap[c] for c in colors]


@lru_cache(maxsize=600_000)
def canonical_cert(p: Poset) -> Cert:
    """Relabeling-invariant certificate; cert(P) == cert(Q) iff P and Q are isomorphic."""
    perm = _canonical_perm(p)
    val = 0
    for j in range(1, p.n):
        for i in range(j):
            if p.lt(perm[i], perm[j]):
                val |= 1 << _pair_index(i, j)
    return Cert(p.n, val)


def canonical_form(p: Poset) -> Poset:
    return cert_to_poset(canonical_cert(p))


def cert_to_poset(cert: Cert) -> Poset:
    n = cert.n
    up = [0] * n
    for j in range(1, n):
        for i in range(j):
            if cert.bits & (1 << _pair_index(i, j)):
                up[i] |= 1 << j
    return Poset(n, up)


def isomorphic(p: Poset, q: Poset) -> bool:
    return p.n == q.n and canonical_cert(p) == canonical_cert(q)


def isomorphisms(p: Poset, q: Poset):
    """Yield every order-isomorphism P -> Q as a tuple (image of each element)."""
    if p.n != q.n:
        return
    cp = _refine(p, _initial_colors(p))
    cq = _refine(q, _initial_colors(q))
    if sorted(Counter(cp).items()) != sorted(Counter(cq).items()):
        return
    n = p.n
    order = sorted(range(n), key=lambda x: (cp[x], x))
    by_color: dict[int, list[int]] = {}
    for y in range(n):
        by_color.setdefault(cq[y], []).append(y)

    image = [-1] * n
    used = 0

    def place(k: int):
        nonlocal used
        if k == n:
            yield tuple(image)
            return
        x = order[k]
        for y in by_color.get(cp[x], ()):
            if used & (1 << y):
                continue
            ok = True
            for a in order[:k]:
                b = image[a]
                if p.lt(a, x) != q.lt(b, y) or p.lt(x, a) != q.lt(y, b):
                    ok = False
                    break
            if ok:
                image[x] = y
                used |= 1 << y
                yield from place(k + 1)
                used &= ~(1 << y)
                image[x] = -1

    yield from place(0)


def automorphisms(p: Poset) -> list[tuple[int, ...]]:
    return list(isomorphisms(p, p))


def is_rigid(p: Poset) -> bool:
    count = 0
    for _ in isomorphisms(p, p):
        count += 1
        if count > 1:
            return False
    return True


def dual_automorphisms(p: Poset) -> list[tuple[int, ...]]:
    """All order-reversing bijections P -> P (x < y iff f(y) < f(x))."""
    return list(isomorphisms(p, p.dual()))


def marked_cert(p: Poset, mask: int) -> tuple[Cert, int]:
    """Certificate plus the canonical image of a distinguished subset.

    Two (poset, subset) pairs get equal results iff some isomorphism carries
    one subset onto the other.
    """
    cert = canonical_cert(p)
    perm = _canonical_perm(p)
    pos = {e: i for i, e in enumerate(perm)}
    base = 0
    for e in bits(mask):
        base |= 1 << pos[e]
    canon = cert_to_poset(cert)
    best = None
    for a in isomorphisms(canon, canon):
        image = 0
        for e in bits(base):
            image |= 1 << a[e]
        if best is None or image < best:
            best = image
    return cert, best


def count_subposets(q: Poset, p: Poset) -> int:
    """Number of subsets S of P with induced(P, S) isomorphic to Q."""
    if q.n > p.n:
        raise SizeError(f"|Q|={q.n} exceeds |P|={p.n}")
    target = canonical_cert(q)
    total = 0
    for subset in combinations(range(p.n), q.n):
        mask = 0
        for e in subset:
            mask |= 1 << e
        if canonical_cert(p.induced(mask)) == target:
            total += 1
    return total


def subposet_profile(p: Poset) -> Counter:
    """Counter mapping cert -> number of subsets inducing it, over all nonempty subsets."""
    out: Counter = Counter()
    for size in range(1, p.n + 1):
        for subset in combinations(range(p.n), size):
            mask = 0
            for e in subset:
                mask |= 1 << e
            out[canonical_cert(p.induced(mask))] += 1
    return out
