"""Minmax pseudo-similar pairs and their derived structure."""

import pytest
from hypothesis import given, settings

from ordrecon.canonical import Cert, canonical_cert, cert_to_poset, isomorphisms
from ordrecon.core import Poset, bits, mask_of, popcount
from ordrecon.errors import (
    InvalidPairError, NotMaximalError, OrbitError, StructureError,
)
from ordrecon.properties import multi_large_component_fixture
from ordrecon.pseudo import (
    compute_partition, filter_shifting, find_minmax_ps_pairs,
    large_components, lh_decomposition, phi_hat, phi_orbit, ps_structure,
    suffix_mask,
)

from conftest import antichain, chain, crown, n_poset, v_poset
from test_core import posets

# smallest connected non-chain poset with a minmax pseudo-similar pair
SMALL_PS = "4:1c"


def small_ps() -> Poset:
    return cert_to_poset(Cert.from_text(SMALL_PS))


class TestDetection:
    def test_chain_bottom_top(self):
        pairs = find_minmax_ps_pairs(chain(5))
        assert len(pairs) == 1
        l, h, phi = pairs[0]
        assert (l, h) == (0, 4)
        assert phi == {x: x + 1 for x in range(4)}

    def test_v_has_none(self):
        assert find_minmax_ps_pairs(v_poset()) == []
        assert ps_structure(v_poset()) is None

    def test_smallest_non_chain_instance(self):
        pairs = find_minmax_ps_pairs(small_ps())
        assert len(pairs) == 1
        l, h, phi = pairs[0]
        p = small_ps()
        assert not p.dn[l] and not p.up[h]
        assert canonical_cert(p.delete(l)) == canonical_cert(p.delete(h))

    @given(posets(max_n=6))
    @settings(max_examples=60)
    def test_pairs_are_witnessed(self, p):
        for l, h, phi in find_minmax_ps_pairs(p):
            lo, hi, _ = p.extremal_sets()
            assert lo & (1 << l) and hi & (1 << h)
            for x in phi:
                for y in phi:
                    assert p.lt(x, y) == p.lt(phi[x], phi[y])


class TestDecomposition:
    def test_chain(self):
        ps = ps_structure(chain(4))
        assert (ps.l, ps.h) == (0, 3)
        assert ps.C == (0b0110,) and ps.L == () and ps.R == ()
        assert ps.K_l == 0b0111 and ps.K_h == 0b1110
        assert ps.orbit == (0, 1, 2, 3)
        assert ps.A_P == (3,) and ps.v == 3
        assert ps.d_dict() == {3: 0}

    def test_small_ps_sets(self):
        p = small_ps()
        ps = ps_structure(p)
        parts = (1 << ps.l) | (1 << ps.h)
        for m in ps.C + ps.L + ps.R:
            assert parts & m == 0
            parts |= m
        assert parts == p.full_mask
        assert ps.R != ()

    def test_invalid_pair_rejected(self):
        p = chain(3)
        with pytest.raises(InvalidPairError):
            lh_decomposition(p, 1, 2, {0: 1, 1: 2})
        with pytest.raises(InvalidPairError):
            lh_decomposition(p, 0, 2, {0: 1, 1: 0})

    @given(posets(max_n=7))
    @settings(max_examples=60)
    def test_invariants(self, p):
        if not p.is_connected():
            return
        ps = ps_structure(p)
        if ps is None:
            return
        down_h = popcount(p.down_set(ps.h))
        lo, hi, _ = p.extremal_sets()
        assert mask_of(ps.A_P) == mask_of(
            x for x in bits(hi) if popcount(p.down_set(x)) == down_h)
        for a, d in ps.d_map:
            j = ps.orbit.index(a) - ps.v
            assert d == ps.orbit[j]


class TestOrbit:
    def test_chain(self):
        ps = ps_structure(chain(4))
        assert phi_orbit(chain(4), ps.l, ps.h, ps.phi_dict()) == [0, 1, 2, 3]

    def test_small_ps_covers_everything(self):
        p = small_ps()
        ps = ps_structure(p)
        assert sorted(ps.orbit) == list(range(p.n))

    def test_corrupted_phi(self):
        with pytest.raises(OrbitError):
            phi_orbit(chain(4), 0, 3, {0: 1, 1: 0, 2: 3})


class TestLargeComponentsAndPartition:
    def test_chain(self):
        ps = ps_structure(chain(4))
        assert large_components(chain(4), ps, 0) == [0b0111]
        part = compute_partition(chain(4), ps)
        assert part.breakpoints == (0, 1) and part.blocks == (0b0111,)

    def test_fixture_multiple_larges(self):
        p = multi_large_component_fixture()
        ps = ps_structure(p)
        assert len(ps.A_P) > 1
        larges = large_components(p, ps, 0)
        assert len(larges) > 1
        # the large components are b, phi[b], ..., phi^{m-1}[b]
        phi = ps.phi_dict()
        b = next(m for m in larges if m & (1 << ps.l))
        images = {b}
        cur = b
        for _ in range(len(larges) - 1):
            cur = mask_of(phi[x] for x in bits(cur))
            images.add(cur)
        assert images == set(larges)

    def test_fixture_partition_segments(self):
        p = multi_large_component_fixture()
        ps = ps_structure(p)
        part = compute_partition(p, ps)
        assert part.breakpoints[0] == 0
        assert part.breakpoints[-1] == p.n - ps.v
        assert len(part.blocks) == p.n - ps.v
        segments = [b - a for a, b in zip(part.breakpoints, part.breakpoints[1:])]
        assert any(s >= 2 for s in segments)
        for k, block in enumerate(part.blocks):
            assert block & (1 << ps.orbit[k])

    def test_k_range_checked(self):
        ps = ps_structure(chain(4))
        with pytest.raises(ValueError):
            large_components(chain(4), ps, 5)

    def test_suffix_mask(self):
        p = multi_large_component_fixture()
        ps = ps_structure(p)
        assert suffix_mask(ps, 0) == mask_of(ps.A_P)
        assert suffix_mask(ps, len(ps.A_P)) == 0


class TestPhiHat:
    def test_chain_is_shift(self):
        ps = ps_structure(chain(4))
        assert phi_hat(chain(4), ps) == {0: 1, 1: 2}

    def test_differs_from_phi_on_preimage_of_r(self):
        p = small_ps()
        ps = ps_structure(p)
        phi = ps.phi_dict()
        hat = phi_hat(p, ps)
        inv = {y: x for x, y in phi.items()}
        pre_r = {inv[y] for m in ps.R for y in bits(m)}
        assert pre_r
        for x in hat:
            if x in pre_r:
                assert hat[x] == phi[phi[x]] != phi[x]
            else:
                assert hat[x] == phi[x]

    @given(posets(max_n=7))
    @settings(max_examples=60)
    def test_unique_isomorphism(self, p):
        if not p.is_connected():
            return
        ps = ps_structure(p)
        if ps is None:
            return
        phi = ps.phi_dict()
        pre_h = {y: x for x, y in phi.items()}[ps.h]
        if not ps.K_l & ~(1 << pre_h):
            return
        dom = p.induced(ps.K_l & ~(1 << pre_h))
        tgt = p.induced(ps.K_l & ~(1 << ps.l))
        assert len(list(isomorphisms(dom, tgt))) == 1


class TestFilterShifting:
    def test_chain_top(self):
        assert filter_shifting(chain(4), 3)

    def test_v_maximal_not_shifting(self):
        assert not filter_shifting(v_poset(), 1)

    def test_non_maximal_rejected(self):
        with pytest.raises(NotMaximalError):
            filter_shifting(chain(3), 0)

    def test_minimal_removal_always_shifts(self):
        # a minimal point's filter appears in no other filter computation
        for p in (n_poset(), crown(), small_ps()):
            lo, hi, _ = p.extremal_sets()
            for x in bits(lo & hi):
                assert filter_shifting(p, x)
