"""Structure attached to a minmax pair of pseudo-similar points (l, h).

Detection of the pair, the witnessing isomorphism phi on the cards, the
fence-reachability decomposition {l,h} + C + L + R with K_l/K_h, the top
set A_P with its designated lower bounds d_p, large components, and the
partition of the suffix blocks cycled by phi.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .canonical import canonical_cert, isomorphisms
from .core import Poset, bits, mask_of, popcount
from .deck import filter_deck
from .errors import InvalidPairError, NotMaximalError, OrbitError, StructureError


def _relabel_iso(p: Poset, s_mask: int, t_mask: int, iso: tuple) -> dict[int, int]:
    """Lift an isomorphism between induced(s_mask) and induced(t_mask) to P's labels."""
    src = list(bits(s_mask))
    tgt = list(bits(t_mask))
    return {src[i]: tgt[j] for i, j in enumerate(iso)}


def find_minmax_ps_pairs(p: Poset) -> list[tuple[int, int, dict[int, int]]]:
    """All (l, h, phi) with l minimal, h maximal, P-h isomorphic to P-l.

    phi maps P minus h onto P minus l, in P's own labels; the first witness
    under the deterministic search order is stored.
    """
    out = []
    lo, hi, _ = p.extremal_sets()
    for l in bits(lo):
        for h in bits(hi):
            if l == h:
                continue
            s_mask = p.full_mask & ~(1 << h)
            t_mask = p.full_mask & ~(1 << l)
            card_h = p.induced(s_mask)
            card_l = p.induced(t_mask)
            if canonical_cert(card_h) != canonical_cert(card_l):
                continue
            iso = next(iter(isomorphisms(card_h, card_l)), None)
            if iso is None:
                continue
            out.append((l, h, _relabel_iso(p, s_mask, t_mask, iso)))
    return out


def phi_orbit(p: Poset, l: int, h: int, phi: dict[int, int]) -> list[int]:
    """The sequence phi^0(l), ..., phi^(n-1)(l); bijective onto P, ending at h."""
    seq = [l]
    seen = {l}
    x = l
    for _ in range(p.n - 1):
        if x not in phi:
            raise OrbitError(f"phi undefined at {x} before the orbit closed")
        x = phi[x]
        if x in seen:
            raise OrbitError(f"orbit revisits {x}")
        seen.add(x)
        seq.append(x)
    if seq[-1] != h:
        raise OrbitError(f"orbit ends at {seq[-1]}, not at h={h}")
    return seq


@dataclass(frozen=True)
class PsStructure:
    """The Def-3.1-style decomposition for one minmax pseudo-similar pair."""

    l: int
    h: int
    phi: tuple[tuple[int, int], ...]         # sorted (x, phi(x)) pairs
    C: tuple[int, ...]                       # component masks of C
    L: tuple[int, ...]                       # component masks of L
    R: tuple[int, ...]                       # component masks of R
    K_l: int
    K_h: int
    orbit: tuple[int, ...]                   # phi^j(l) for j = 0..n-1
    A_P: tuple[int, ...]                     # phi^v(l), ..., phi^(n-1)(l)
    v: int
    d_map: tuple[tuple[int, int], ...]       # (p, d_p) for p in A_P

    def phi_dict(self) -> dict[int, int]:
        return dict(self.phi)

    def d_dict(self) -> dict[int, int]:
        return dict(self.d_map)

    def to_json(self) -> str:
        return json.dumps({
            "l": self.l, "h": self.h,
            "phi": list(map(list, self.phi)),
            "C": list(self.C), "L": list(self.L), "R": list(self.R),
            "K_l": self.K_l, "K_h": self.K_h,
            "orbit": list(self.orbit),
            "A_P": list(self.A_P), "v": self.v,
            "d_map": list(map(list, self.d_map)),
        }, sort_keys=True)


def lh_decomposition(p: Poset, l: int, h: int, phi: dict[int, int]) -> PsStructure:
    """Compute C, L, R, K_l, K_h, A_P, v and the d-map for a valid pair."""
    lo, hi, _ = p.extremal_sets()
    if not (lo & (1 << l)) or not (hi & (1 << h)) or l == h:
        raise InvalidPairError(f"({l},{h}) is not a minimal/maximal pair")
    card_h_mask = p.full_mask & ~(1 << h)
    card_l_mask = p.full_mask & ~(1 << l)
    if sorted(phi) != list(bits(card_h_mask)) or sorted(phi.values()) != list(bits(card_l_mask)):
        raise InvalidPairError("phi is not a bijection from P minus h to P minus l")
    for x in phi:
        for y in phi:
            if p.lt(x, y) != p.lt(phi[x], phi[y]):
                raise InvalidPairError(f"phi not order-preserving on ({x},{y})")

    k_l = next(m for m in p.components_within(card_h_mask) if m & (1 << l))
    k_h = next(m for m in p.components_within(card_l_mask) if m & (1 << h))
    rest = p.full_mask & ~(1 << l) & ~(1 << h)
    c_set = k_l & k_h & rest
    l_set = rest & ~k_h          # no fence to h avoiding l
    r_set = rest & ~k_l          # no fence to l avoiding h
    if (c_set | l_set | r_set) != rest or (l_set & r_set):
        raise StructureError("C, L, R do not partition P minus {l,h}")

    orbit = phi_orbit(p, l, h, phi)
    down_h = popcount(p.down_set(h))
    a_mask = mask_of(x for x in bits(hi) if popcount(p.down_set(x)) == down_h)
    positions = sorted(orbit.index(x) for x in bits(a_mask))
    v = positions[0]
    if positions != list(range(v, p.n)):
        raise StructureError("A_P is not a suffix of the phi orbit")
    a_list = tuple(orbit[v:])
    d_map = tuple((orbit[v + j], orbit[j]) for j in range(p.n - v))

    return PsStructure(
        l=l, h=h,
        phi=tuple(sorted(phi.items())),
        C=tuple(p.components_within(c_set)) if c_set else (),
        L=tuple(p.components_within(l_set)) if l_set else (),
        R=tuple(p.components_within(r_set)) if r_set else (),
        K_l=k_l, K_h=k_h,
        orbit=tuple(orbit),
        A_P=a_list, v=v, d_map=d_map,
    )


def ps_structure(p: Poset) -> PsStructure | None:
    """Structure for the (unique, for connected P) minmax ps pair, if any."""
    pairs = find_minmax_ps_pairs(p)
    if not pairs:
        return None
    l, h, phi = pairs[0]
    return lh_decomposition(p, l, h, phi)


def suffix_mask(ps: PsStructure, k: int) -> int:
    """Mask of {phi^(v+k)(l), ..., phi^(n-1)(l)}."""
    return mask_of(ps.A_P[k:])


def large_components(p: Poset, ps: PsStructure, k: int) -> list[int]:
    """Components of P minus the k-th suffix of A_P with as many elements as l's."""
    if not 0 <= k <= len(ps.A_P):
        raise ValueError(f"k={k} outside 0..{len(ps.A_P)}")
    rest = p.full_mask & ~suffix_mask(ps, k)
    comps = p.components_within(rest)
    b = next(m for m in comps if m & (1 << ps.l))
    size = popcount(b)
    return [m for m in comps if popcount(m) == size]


@dataclass(frozen=True)
class APartition:
    breakpoints: tuple[int, ...]            # 0 = k_0 < ... < k_X = n - v
    blocks: tuple[int, ...]                 # masks B_0, ..., B_(n-v-1)


def compute_partition(p: Poset, ps: PsStructure) -> APartition:
    """Blocks B_k with phi[B_k] = B_(k+1) inside segments and phi^k(l) in B_k.

    Built by iterating the large-component construction: within a segment the
    large components at suffix k_x are B, phi[B], ..., phi^(m-1)[B] where B
    contains l.
    """
    phi = ps.phi_dict()
    top = len(ps.A_P)
    breakpoints = [0]
    blocks: list[int] = []
    k = 0
    while k < top:
        larges = large_components(p, ps, k)
        b = next(m for m in larges if m & (1 << ps.l))
        m = len(larges)
        images = [b]
        for _ in range(m - 1):
            images.append(mask_of(phi[x] for x in bits(images[-1])))
        if sorted(images) != sorted(larges):
            raise StructureError(
                f"large components at k={k} are not b, phi[b], ..., phi^{m - 1}[b]")
        for j, block in enumerate(images):
            if not (block & (1 << ps.orbit[k + j])):
                raise StructureError(f"phi^{k + j}(l) not in block {k + j}")
        blocks.extend(images)
        k += m
        breakpoints.append(k)
    return APartition(tuple(breakpoints), tuple(blocks))


def phi_hat(p: Poset, ps: PsStructure) -> dict[int, int]:
    """The unique isomorphism K_l minus phi^(-1)(h) -> K_l minus l.

    phi_hat(x) = phi(x) off phi^(-1)[R], phi(phi(x)) on it.
    """
    phi = ps.phi_dict()
    inv = {y: x for x, y in phi.items()}
    r_mask = 0
    for m in ps.R:
        r_mask |= m
    pre_r = mask_of(inv[y] for y in bits(r_mask))
    pre_h = inv[ps.h]
    domain = ps.K_l & ~(1 << pre_h)
    target = ps.K_l & ~(1 << ps.l)
    out = {}
    for x in bits(domain):
        y = phi[x]
        if pre_r & (1 << x):
            y = phi[y]
        out[x] = y
    if sorted(out.values()) != list(bits(target)):
        raise StructureError("phi_hat is not a bijection onto K_l minus l")
    for x in out:
        for y in out:
            if p.lt(x, y) != p.lt(out[x], out[y]):
                raise StructureError(f"phi_hat not order-preserving on ({x},{y})")
    return out


def filter_shifting(p: Poset, x: int) -> bool:
    """True iff the card's filter deck is P's filter deck minus one filter."""
    if p.up[x]:
        raise NotMaximalError(f"{x} is not maximal")
    parent = filter_deck(p)
    card = filter_deck(p.delete(x))
    diff = parent - card
    gained = card - parent
    return not gained and sum(diff.values()) == 1
