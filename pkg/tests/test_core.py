"""Poset value type: construction, order queries, and structural invariants."""

import pytest
from hypothesis import given, strategies as st

from ordrecon.core import (
    Poset, bits, disjoint_union, format_poset_text, linear_sum, mask_of,
    parse_poset_text, popcount,
)
from ordrecon.errors import CycleError

from conftest import antichain, chain, crown, lam_poset, n_poset, v_poset


def posets(max_n: int = 7) -> st.SearchStrategy[Poset]:
    """Random posets via cover pairs over a shuffled label order."""
    def build(n: int, pair_flags: list[bool], perm: list[int]) -> Poset:
        covers = []
        k = 0
        for j in range(n):
            for i in range(j):
                if pair_flags[k]:
                    covers.append((perm[i], perm[j]))
                k += 1
        return Poset.from_cover_pairs(n, covers)
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(
            st.lists(st.booleans(), min_size=n * (n - 1) // 2,
                     max_size=n * (n - 1) // 2),
            st.permutations(range(n)),
        ).map(lambda t: build(n, t[0], list(t[1]))))


class TestConstruction:
    def test_closure_is_applied(self):
        p = Poset.from_cover_pairs(3, [(0, 1), (1, 2)])
        assert p.lt(0, 2)

    def test_cycle_rejected(self):
        with pytest.raises(CycleError):
            Poset.from_cover_pairs(2, [(0, 1), (1, 0)])

    def test_empty_relation(self):
        p = Poset.from_cover_pairs(3, [])
        assert not any(p.lt(x, y) for x in range(3) for y in range(3))

    def test_out_of_range_rejected(self):
        with pytest.raises(IndexError):
            Poset.from_cover_pairs(2, [(0, 5)])

    @given(posets())
    def test_relation_is_a_strict_order(self, p):
        for x in range(p.n):
            assert not p.lt(x, x)
            for y in range(p.n):
                assert not (p.lt(x, y) and p.lt(y, x))
                for z in range(p.n):
                    if p.lt(x, y) and p.lt(y, z):
                        assert p.lt(x, z)


class TestExtremalAndRank:
    def test_chain_extremals(self):
        lo, hi, ext = chain(3).extremal_sets()
        assert (lo, hi, ext) == (0b001, 0b100, 0b101)

    def test_antichain_extremals(self):
        lo, hi, ext = antichain(3).extremal_sets()
        assert lo == hi == ext == 0b111

    def test_v_extremals(self):
        lo, hi, _ = v_poset().extremal_sets()
        assert (lo, hi) == (0b001, 0b110)

    def test_chain_ranks(self):
        ranks, _, height = chain(4).rank_profile()
        assert ranks == (0, 1, 2, 3) and height == 3

    def test_v_ranks(self):
        ranks, dual, _ = v_poset().rank_profile()
        assert ranks[1] == ranks[2] == 1 and dual[0] == 1

    def test_n_poset_ranks(self):
        ranks, dual, _ = n_poset().rank_profile()
        assert ranks[2] == ranks[3] == 1
        assert dual[0] == dual[1] == 1

    @given(posets())
    def test_rank_plus_dual_rank_is_longest_chain(self, p):
        ranks, dual, _ = p.rank_profile()
        for x in range(p.n):
            assert ranks[x] + dual[x] == p.longest_chain_through(x)

    def test_longest_chain_examples(self):
        assert chain(4).longest_chain_through(1) == 3
        assert v_poset().longest_chain_through(0) == 1
        assert n_poset().longest_chain_through(3) == 1


class TestSetsAndComponents:
    def test_down_set_chain(self):
        assert chain(3).down_set(2) == 0b111

    def test_neighborhood(self):
        assert antichain(3).neighborhood(0b001) == 0b001
        assert v_poset().neighborhood(0b010) == 0b011

    def test_components_sizes(self):
        p = disjoint_union(chain(2), antichain(1))
        assert sorted(popcount(c) for c in p.components()) == [1, 2]
        assert chain(5).is_connected()
        assert len(antichain(4).components()) == 4

    @given(posets())
    def test_components_partition(self, p):
        comps = p.components()
        union = 0
        for m in comps:
            assert union & m == 0
            union |= m
        assert union == p.full_mask
        assert p.is_connected() == (len(comps) == 1)


class TestSumsAndDuality:
    def test_linear_sum_of_points(self):
        p = linear_sum(antichain(1), antichain(1))
        assert p.lt(0, 1) and p.n == 2

    def test_chain_summands(self):
        assert len(chain(4).linear_summands()) == 4

    def test_v_is_a_linear_sum(self):
        # point below a 2-antichain: all cross pairs comparable
        assert not v_poset().is_coconnected()
        assert len(v_poset().linear_summands()) == 2

    def test_n_poset_coconnected(self):
        assert n_poset().is_coconnected()
        assert len(n_poset().linear_summands()) == 1

    def test_dual_of_v_is_lam(self):
        d = v_poset().dual()
        lo, hi, _ = d.extremal_sets()
        assert popcount(lo) == 2 and popcount(hi) == 1

    def test_induced_keeps_closure(self):
        q = chain(3).induced(0b101)
        assert q.n == 2 and q.lt(0, 1)

    def test_induced_full_is_identity(self):
        p = n_poset()
        assert p.induced(p.full_mask) == p

    @given(posets(max_n=5), st.integers(0, 31))
    def test_induced_commutes_with_dual(self, p, mask):
        mask &= p.full_mask
        if not mask:
            return
        assert p.dual().induced(mask) == p.induced(mask).dual()

    @given(posets(max_n=4), posets(max_n=4))
    def test_summands_concatenate(self, a, b):
        expect = len(a.linear_summands()) + len(b.linear_summands())
        assert len(linear_sum(a, b).linear_summands()) == expect


class TestWidthAndDismantling:
    def test_chain_width_dismantlable(self):
        assert chain(5).width() == 1
        assert chain(5).is_dismantlable()

    def test_two_antichain_not_dismantlable(self):
        assert antichain(2).width() == 2
        assert not antichain(2).is_dismantlable()

    def test_crown_not_dismantlable(self):
        assert not crown().is_dismantlable()

    def test_cutpoints(self):
        # 0 < 2 survives deleting the chain's middle, so 1 is no cutpoint
        is_cut, parts = chain(3).cutpoint_queries(1)
        assert not is_cut and [q.n for q in parts] == [2]
        assert not chain(3).cutpoint_queries(0)[0]
        is_cut, parts = v_poset().cutpoint_queries(0)
        assert is_cut and len(parts) == 2


class TestTextFormat:
    def test_round_trip(self):
        text = "4\n0<1\n1<2\n# comment\n1<3\n"
        p = parse_poset_text(text)
        assert p.lt(0, 3)
        assert parse_poset_text(format_poset_text(p)) == p

    @given(posets())
    def test_format_parse_identity(self, p):
        assert parse_poset_text(format_poset_text(p)) == p
