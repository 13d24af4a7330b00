"""Cards, decks, pi-decks, Kelly counting from the deck, and the deck inverter.

A deck is the multiset of certificates of all one-point-deleted induced
subposets.  The inverter enumerates every poset (up to isomorphism) with a
given deck by extending the lexicographically least card; it is the
universal deck-only oracle at desk scale.

Deck file format: header ``deck n=<n>``, then one line ``<multiplicity>
<cert-string>`` per distinct card, sorted by certificate.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from functools import lru_cache

from .core import Poset, bits, popcount
from .canonical import Cert, canonical_cert, cert_to_poset, count_subposets
from .decomposition import ntma_points
from .errors import InconsistentDeckError, SizeError


@dataclass(frozen=True)
class Deck:
    """Multiset of cards of an n-element poset; total multiplicity is n."""

    n: int
    entries: tuple[tuple[Cert, int], ...]   # sorted by cert

    @classmethod
    def from_counter(cls, n: int, counter: Counter) -> "Deck":
        return cls(n, tuple(sorted(counter.items())))

    def counter(self) -> Counter:
        return Counter(dict(self.entries))

    def total(self) -> int:
        return sum(m for _, m in self.entries)

    def cards(self):
        """Iterate (card poset, multiplicity), card decoded from its cert."""
        for cert, mult in self.entries:
            yield cert_to_poset(cert), mult

    def least_card(self) -> Cert:
        return self.entries[0][0]

    def to_text(self) -> str:
        lines = [f"deck n={self.n}"]
        lines.extend(f"{mult} {cert.text()}" for cert, mult in self.entries)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Deck":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("deck n="):
            raise ValueError("missing 'deck n=<n>' header")
        n = int(lines[0][len("deck n="):])
        counter: Counter = Counter()
        for line in lines[1:]:
            mult_s, _, cert_s = line.partition(" ")
            counter[Cert.from_text(cert_s)] += int(mult_s)
        return cls.from_counter(n, counter)


def deck(p: Poset) -> Deck:
    if p.n < 1:
        raise SizeError("deck of the empty poset")
    counter: Counter = Counter()
    for x in range(p.n):
        counter[canonical_cert(p.delete(x))] += 1
    return Deck.from_counter(p.n, counter)


def dual_deck(d: Deck) -> Deck:
    """Deck of the dual poset: every card dualized."""
    counter: Counter = Counter()
    for card, mult in d.cards():
        counter[canonical_cert(card.dual())] += mult
    return Deck.from_counter(d.n, counter)


def select_points(p: Poset, predicate) -> int:
    """Mask of points with the given property.

    Accepted predicates: 'minimal', 'maximal', 'extremal', 'ntma',
    ('rank', r), ('nonmaximal_rank', r), ('nonextremal_rank', r),
    ('ntma_rank', r).
    """
    lo, hi, ext = p.extremal_sets()
    if predicate == "minimal":
        return lo
    if predicate == "maximal":
        return hi
    if predicate == "extremal":
        return ext
    if predicate == "ntma":
        return ntma_points(p)
    kind, r = predicate
    rank = p.ranks()
    at_rank = 0
    for x in range(p.n):
        if rank[x] == r:
            at_rank |= 1 << x
    if kind == "rank":
        return at_rank
    if kind == "nonmaximal_rank":
        return at_rank & ~hi
    if kind == "nonextremal_rank":
        return at_rank & ~ext
    if kind == "ntma_rank":
        return at_rank & ntma_points(p)
    raise ValueError(f"unknown predicate {predicate!r}")


def pi_deck(p: Poset, predicate) -> Deck:
    """Ground-truth pi-deck: cards whose removed point has the property."""
    counter: Counter = Counter()
    for x in bits(select_points(p, predicate)):
        counter[canonical_cert(p.delete(x))] += 1
    return Deck.from_counter(p.n, counter)


def kelly_count_from_deck(q: Poset, d: Deck) -> int:
    """s(Q, P) recovered from the deck: sum of s(Q, C) over cards, divided by n-|Q|."""
    if q.n >= d.n:
        raise SizeError(f"|Q|={q.n} must be smaller than n={d.n}")
    if d.n <= 3:
        raise SizeError("Kelly counting needs decks of posets with more than 3 elements")
    total = sum(mult * count_subposets(q, card) for card, mult in d.cards())
    divisor = d.n - q.n
    if total % divisor:
        raise ArithmeticError(f"inexact Kelly division {total}/{divisor}; corrupt deck")
    return total // divisor


def ideal_deck(p: Poset) -> Counter:
    return Counter(canonical_cert(p.induced(p.down_set(x))) for x in range(p.n))


def filter_deck(p: Poset) -> Counter:
    return Counter(canonical_cert(p.induced(p.up_set(x))) for x in range(p.n))


def neighborhood_deck(p: Poset, k: int) -> Counter:
    rank = p.ranks()
    return Counter(
        canonical_cert(p.induced(p.neighborhood(1 << x)))
        for x in range(p.n)
        if rank[x] == k
    )


def ideal_size_sequence(p: Poset) -> tuple[int, ...]:
    return p.ideal_size_sequence()


def valid_extension_pairs(p: Poset):
    """All (down_mask, up_mask) pairs for which add_point stays a poset.

    down_mask must be down-closed, up_mask up-closed, disjoint, and every
    point of down_mask strictly below every point of up_mask.
    """
    n = p.n
    ideals = [m for m in range(1 << n) if _down_closed(p, m)]
    for dmask in ideals:
        allowed = 0
        for u in range(n):
            if not (dmask >> u) & 1 and (p.dn[u] & dmask) == dmask:
                allowed |= 1 << u
        sub = allowed
        while True:
            if _up_closed(p, sub):
                yield dmask, sub
            if sub == 0:
                break
            sub = (sub - 1) & allowed


def _down_closed(p: Poset, mask: int) -> bool:
    return all(not (p.dn[x] & ~mask) for x in bits(mask))


def _up_closed(p: Poset, mask: int) -> bool:
    return all(not (p.up[x] & ~mask) for x in bits(mask))


def one_point_extensions(p: Poset):
    """All posets obtained by adding one point, deduplicated by certificate."""
    seen = set()
    for dmask, umask in valid_extension_pairs(p):
        q = p.add_point(dmask, umask)
        cert = canonical_cert(q)
        if cert not in seen:
            seen.add(cert)
            yield q, cert


def _card_size_sequences(p: Poset) -> tuple:
    """Cheap deck invariant: sorted multiset of (ideal, filter) size sequences of cards."""
    out = []
    for x in range(p.n):
        card = p.delete(x)
        out.append((card.ideal_size_sequence(), card.filter_size_sequence()))
    return tuple(sorted(out))


def invert_deck(d: Deck) -> list[Poset]:
    """All posets (canonical forms, sorted by cert) whose deck equals d.

    Extends the lexicographically least card by one point, prunes candidates
    by the cards' ideal/filter size sequences, then compares full decks.
    """
    if d.n < 2:
        raise SizeError("deck inversion needs n >= 2")
    if d.total() != d.n or any(cert.n != d.n - 1 for cert, _ in d.entries):
        raise InconsistentDeckError("card sizes or multiplicities inconsistent with n")
    base = cert_to_poset(d.least_card())
    target_cheap = None
    found: dict[Cert, Poset] = {}
    for q, cert in one_point_extensions(base):
        if cert in found:
            continue
        if target_cheap is None:
            target_cheap = _target_card_size_sequences(d)
        if _card_size_sequences(q) != target_cheap:
            continue
        if deck(q) == d:
            found[cert] = cert_to_poset(cert)
    if not found:
        raise InconsistentDeckError("no one-point extension of the least card has this deck")
    return [found[c] for c in sorted(found)]


def _target_card_size_sequences(d: Deck) -> tuple:
    out = []
    for card, mult in d.cards():
        item = (card.ideal_size_sequence(), card.filter_size_sequence())
        out.extend([item] * mult)
    return tuple(sorted(out))


@lru_cache(maxsize=4096)
def invert_deck_cached(d: Deck) -> tuple[Cert, ...]:
    """Memoized inverter returning witness certificates."""
    return tuple(canonical_cert(w) for w in invert_deck(d))


def deck_groups(n: int, universe) -> list[list[Cert]]:
    """Partition posets (given as certs or posets) by deck equality.

    Returns groups as sorted cert lists, sorted by first member.
    """
    by_deck: dict[Deck, list[Cert]] = {}
    for item in universe:
        if isinstance(item, Cert):
            cert, p = item, cert_to_poset(item)
        else:
            p, cert = item, canonical_cert(item)
        if p.n != n:
            raise SizeError(f"universe member has {p.n} elements, expected {n}")
        by_deck.setdefault(deck(p), []).append(cert)
    groups = [sorted(v) for v in by_deck.values()]
    groups.sort(key=lambda g: g[0])
    return groups
