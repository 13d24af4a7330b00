"""Canonical certificates, isomorphism enumeration, and copy counting."""

from itertools import permutations

from hypothesis import given, strategies as st

from ordrecon.canonical import (
    Cert, automorphisms, canonical_cert, cert_to_poset, count_subposets,
    dual_automorphisms, is_rigid, isomorphic, isomorphisms, marked_cert,
    subposet_profile,
)
from ordrecon.core import Poset

from conftest import antichain, chain, lam_poset, n_poset, v_poset
from oracles import iso_classes, matrices_isomorphic, naive_count_subposets
from test_core import posets


def relabel(p: Poset, perm) -> Poset:
    covers = [(perm[x], perm[y]) for x in range(p.n) for y in range(p.n)
              if p.lt(x, y)]
    return Poset.from_cover_pairs(p.n, covers)


def to_matrix(p: Poset):
    return tuple(tuple(p.lt(x, y) for y in range(p.n)) for x in range(p.n))


def from_matrix(m) -> Poset:
    n = len(m)
    return Poset(n, [sum(1 << y for y in range(n) if m[x][y]) for x in range(n)])


class TestCertificate:
    def test_relabeling_invariance_example(self):
        p = Poset.from_cover_pairs(3, [(2, 0), (0, 1)])
        assert canonical_cert(p) == canonical_cert(chain(3))

    def test_v_and_lam_differ(self):
        assert canonical_cert(v_poset()) != canonical_cert(lam_poset())

    @given(posets(max_n=6), st.randoms(use_true_random=False))
    def test_relabeling_invariance(self, p, rng):
        perm = list(range(p.n))
        rng.shuffle(perm)
        assert canonical_cert(relabel(p, perm)) == canonical_cert(p)

    @given(posets(max_n=6))
    def test_cert_round_trips_through_poset(self, p):
        cert = canonical_cert(p)
        q = cert_to_poset(cert)
        assert canonical_cert(q) == cert
        assert isomorphic(p, q)

    def test_cert_text_round_trip(self):
        cert = canonical_cert(n_poset())
        assert Cert.from_text(cert.text()) == cert

    def test_distinct_cert_count_n4(self):
        # matches the independent naive oracle's 16 classes
        certs = {canonical_cert(from_matrix(m)) for m in iso_classes(4)}
        assert len(certs) == 16

    def test_soundness_vs_permutation_isomorphism_n4(self):
        mats = iso_classes(4)
        ps = [from_matrix(m) for m in mats]
        for i, a in enumerate(ps):
            for j, b in enumerate(ps):
                expect = matrices_isomorphic(mats[i], mats[j])
                assert (canonical_cert(a) == canonical_cert(b)) == expect


class TestMorphisms:
    def test_two_antichain_automorphisms(self):
        assert sorted(automorphisms(antichain(2))) == [(0, 1), (1, 0)]
        assert not is_rigid(antichain(2))

    def test_chain_rigid(self):
        assert automorphisms(chain(5)) == [(0, 1, 2, 3, 4)]
        assert is_rigid(chain(5))

    def test_v_lam_no_isomorphisms(self):
        assert list(isomorphisms(v_poset(), lam_poset())) == []

    @given(posets(max_n=5))
    def test_isomorphisms_match_brute_force(self, p):
        got = set(isomorphisms(p, p))
        brute = {perm for perm in permutations(range(p.n))
                 if all(p.lt(x, y) == p.lt(perm[x], perm[y])
                        for x in range(p.n) for y in range(p.n))}
        assert got == brute

    def test_dual_automorphisms(self):
        assert len(dual_automorphisms(chain(2))) == 1
        assert dual_automorphisms(v_poset()) == []
        assert len(dual_automorphisms(antichain(2))) == 2


class TestCounting:
    def test_chain_pairs(self):
        assert count_subposets(chain(2), chain(3)) == 3
        assert count_subposets(antichain(2), chain(3)) == 0

    def test_v_copies_in_n(self):
        assert count_subposets(v_poset(), n_poset()) == 1

    @given(posets(max_n=4), posets(max_n=5))
    def test_count_matches_naive(self, q, p):
        if q.n > p.n:
            q, p = p, q
        assert count_subposets(q, p) == naive_count_subposets(
            to_matrix(q), to_matrix(p))

    @given(posets(max_n=5))
    def test_profile_totals(self, p):
        profile = subposet_profile(p)
        assert sum(profile.values()) == 2 ** p.n - 1
        assert profile[canonical_cert(p)] == 1


class TestMarkedCert:
    def test_marked_subset_distinguishes(self):
        p = antichain(3)
        # any singleton is carried to any other by an automorphism
        assert marked_cert(p, 0b001) == marked_cert(p, 0b100)

    def test_marked_subset_detects_difference(self):
        p = v_poset()
        assert marked_cert(p, 0b001) != marked_cert(p, 0b010)
        assert marked_cert(p, 0b010) == marked_cert(p, 0b100)
