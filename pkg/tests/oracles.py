"""Independent naive oracles used to derive frozen test values.

Everything here deliberately avoids the package's canonicalization and
enumeration code paths: isomorphism is brute-force permutation search and
enumeration generates upper-triangular transitive relations directly.  The
FROZEN_* values below were computed once with these oracles and are asserted
against the package under test.
"""

from __future__ import annotations

from itertools import combinations, permutations


def closed_upper_matrices(n: int) -> list[tuple[tuple[bool, ...], ...]]:
    """All transitively closed strict orders with 0..n-1 a linear extension.

    Every isomorphism class of an n-element poset has at least one such
    representative, so grouping these by isomorphism covers the universe.
    """
    pairs = [(i, j) for j in range(n) for i in range(j)]
    out = []
    for bitsel in range(1 << len(pairs)):
        lt = [[False] * n for _ in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bitsel >> k & 1:
                lt[i][j] = True
        ok = True
        for i, j in pairs:
            if not lt[i][j]:
                continue
            for k in range(j + 1, n):
                if lt[j][k] and not lt[i][k]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(tuple(row) for row in lt))
    return out


def matrices_isomorphic(a, b) -> bool:
    n = len(a)
    if sorted(sum(row) for row in a) != sorted(sum(row) for row in b):
        return False
    for perm in permutations(range(n)):
        if all(a[x][y] == b[perm[x]][perm[y]] for x in range(n) for y in range(n)):
            return True
    return False


def iso_classes(n: int) -> list[tuple[tuple[bool, ...], ...]]:
    """One matrix per isomorphism class of n-element posets."""
    reps: dict[tuple, list] = {}
    for m in closed_upper_matrices(n):
        downs = tuple(sorted(sum(m[x][y] for x in range(n)) for y in range(n)))
        ups = tuple(sorted(sum(m[x][y] for y in range(n)) for x in range(n)))
        bucket = reps.setdefault((downs, ups), [])
        if not any(matrices_isomorphic(m, r) for r in bucket):
            bucket.append(m)
    return [m for bucket in reps.values() for m in bucket]


def naive_count_subposets(q, p) -> int:
    """Number of subsets of p inducing a poset isomorphic to q, by brute force."""
    nq, np_ = len(q), len(p)
    total = 0
    for subset in combinations(range(np_), nq):
        sub = tuple(tuple(p[x][y] for y in subset) for x in subset)
        if matrices_isomorphic(sub, q):
            total += 1
    return total


def naive_deck(p) -> list[tuple[tuple[bool, ...], ...]]:
    """Cards of p as matrices, deduplicated only as a list (multiset order free)."""
    n = len(p)
    cards = []
    for x in range(n):
        keep = [y for y in range(n) if y != x]
        cards.append(tuple(tuple(p[a][b] for b in keep) for a in keep))
    return cards


def decks_equal(d1, d2) -> bool:
    """Multiset equality of two card lists under brute-force isomorphism."""
    if len(d1) != len(d2):
        return False
    used = [False] * len(d2)
    for c in d1:
        for i, c2 in enumerate(d2):
            if not used[i] and matrices_isomorphic(c, c2):
                used[i] = True
                break
        else:
            return False
    return True


# Values derived once from the oracles above (see each test for the replay).
FROZEN_UNIVERSE_COUNTS = {1: 1, 2: 2, 3: 5, 4: 16, 5: 63, 6: 318}
FROZEN_LARGE_COUNTS = {7: 2045, 8: 16999, 9: 183231}   # two-strategy self-check
FROZEN_CONNECTED_COUNTS = {4: 10, 5: 44, 6: 238, 7: 1650, 8: 14512}
FROZEN_PS_UNIVERSE_COUNTS = {2: 1, 3: 1, 4: 2, 5: 2, 6: 5, 7: 6, 8: 13, 9: 15}
