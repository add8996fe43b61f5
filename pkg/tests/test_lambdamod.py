"""Finite-level modules: torsion, filtrations, norms, shapes, ranks.

The enumeration oracle is exhaustive iteration over module elements; the
fast paths are Howell-based.  Both are compared on every desk-scale case.
"""

import random

import pytest

from iwaheights.errors import EnumerationCapError, IwaheightsError
from iwaheights.iwalg import GroupRingElem, IwasawaPoly
from iwaheights.lambdamod import (
    ElementaryShape,
    FiniteLevelModule,
    infer_invariants,
    module_from_shape,
    shape_dims,
    zp_rank_estimate,
)


def lambda_block(spec, level, nblocks=1, enum_cap=3**10):
    """The free rank-nblocks module over the level group ring."""
    return FiniteLevelModule(spec, level, nblocks, [], enum_cap=enum_cap)


def brute_torsion(M, f_class):
    return {v for v in M.elements() if not any(M.act(f_class, v))}


class TestModuleBasics:
    def test_sizes(self, spec31, spec32):
        assert lambda_block(spec31, 1).size == 27
        assert lambda_block(spec32, 1).size == 729
        assert lambda_block(spec31, 1, 2).size == 729

    def test_quotient_size(self, spec31):
        # Lambda_1 / (T) over F_3 is O
        M = FiniteLevelModule(spec31, 1, 1, [[[0, 1]]])
        assert M.size == 3

    def test_elements_are_canonical_and_distinct(self, spec31):
        M = FiniteLevelModule(spec31, 1, 1, [[[0, 1]]])
        els = M.elements()
        assert len(els) == M.size
        assert all(M.canon(v) == v for v in els)

    def test_action_respects_relations(self, spec32):
        # gamma acts trivially on Lambda_1/(T)
        M = FiniteLevelModule(spec32, 1, 1, [[[0, 1]]])
        for v in M.elements():
            assert M.act(M.gamma_class(), v) == v

    def test_cap_guard(self, spec31):
        M = lambda_block(spec31, 1, enum_cap=10)
        with pytest.raises(EnumerationCapError):
            M.elements()


class TestTorsion:
    def test_T_torsion_of_level1_block(self, spec31):
        # Lambda_1 over F_3 is F_3[T]/(T^3); the T-torsion is spanned by T^2
        M = lambda_block(spec31, 1)
        tor = M.torsion(IwasawaPoly.T(spec31))
        t2 = M.from_components([GroupRingElem.from_poly_coeffs(spec31, 1, [0, 0, 1])])
        assert tor.order() == 3
        assert tor.contains(t2)

    def test_unit_torsion_trivial(self, spec31):
        M = lambda_block(spec31, 1)
        assert M.torsion(IwasawaPoly.one(spec31)).order() == 1

    def test_omega_torsion_everything(self, spec31):
        M = lambda_block(spec31, 1)
        om = IwasawaPoly(spec31, [0, 0, 0, 1])  # omega_1 mod 3
        assert M.torsion(om).order() == M.size

    def test_torsion_against_enumeration(self, spec31, spec32):
        rng = random.Random(3)
        for spec in (spec31, spec32):
            M = lambda_block(spec, 1)
            for _ in range(6):
                f = GroupRingElem(spec, 1, [rng.randrange(spec.modulus) for _ in range(3)])
                fast = M.torsion(f)
                brute = brute_torsion(M, f)
                assert {tuple(v) for v in fast.elements()} == brute


class TestJFiltration:
    def test_level1_block_mod3(self, spec31):
        # frozen expectations for F_3[T]/(T^3):
        #   M^(1) = M^(2) = M^(3) = span{T^2}, M^(4) = 0
        #   delta orders (3, 3, 3, 1)
        M = lambda_block(spec31, 1)
        rep = M.j_filtration(4)
        t2 = M.from_components([GroupRingElem.from_poly_coeffs(spec31, 1, [0, 0, 1])])
        for r in (1, 2, 3):
            assert rep.stage(r).order() == 3
            assert rep.stage(r).contains(t2)
        assert rep.stage(4).order() == 1
        assert rep.delta_orders == [3, 3, 3, 1]

    def test_trivial_module_filtration(self, spec31):
        M = FiniteLevelModule(spec31, 1, 1, [[[0, 1]]])  # Lambda/J = O
        rep = M.j_filtration(2)
        assert rep.stage(1).order() == 3
        assert rep.stage(2).order() == 1

    def test_zero_module(self, spec31):
        M = FiniteLevelModule(spec31, 1, 1, [[[1]]])
        rep = M.j_filtration(3)
        assert all(rep.stage(r).order() == 1 for r in (1, 2, 3))

    def test_stage_against_enumeration(self, spec31):
        M = lambda_block(spec31, 1)
        els = M.elements()
        tcl = M.T_class()
        for r in (1, 2, 3, 4):
            # oracle: M[J^r] by enumeration, then (gamma-1)^(r-1) images
            tor = set(els)
            x = GroupRingElem.one(spec31, 1)
            for _ in range(r):
                x = x * tcl
            tor = {v for v in els if not any(M.act(x, v))}
            y = GroupRingElem.one(spec31, 1)
            for _ in range(r - 1):
                y = y * tcl
            imgs = {M.act(y, v) for v in tor}
            stage = M.j_filtration(r).stage(r)
            assert {tuple(v) for v in stage.elements()} == imgs

    def test_generator_independence_enforced(self, spec31, spec32):
        for spec in (spec31, spec32):
            M = lambda_block(spec, 1)
            M.j_filtration(3, check_generator_independence=True)

    def test_delta_orders_multiply(self, spec32):
        M = lambda_block(spec32, 1)
        rep = M.j_filtration(6)
        prod = 1
        for d in rep.delta_orders:
            prod *= d
        assert prod == M.j_torsion(6).order()


class TestUniversalNorms:
    def test_level1_block_is_zero(self, spec31):
        M = lambda_block(spec31, 1)
        assert M.universal_norms().order() == 1

    def test_trivial_module_zero(self, spec31, spec32):
        for spec in (spec31, spec32):
            M = FiniteLevelModule(spec, 1, 1, [[[0, 1]]])
            assert M.universal_norms().order() == 1

    def test_zero_module(self, spec31):
        M = FiniteLevelModule(spec31, 1, 1, [[[1]]])
        assert M.universal_norms().order() == 1

    def test_against_distinguished_divisor_oracle(self, spec31):
        # k = 1: cross-check against the intersection of f*M over nonzero f
        # of degree <= 4 (f distinguished iff f != 0 when k = 1)
        M = lambda_block(spec31, 1)
        els = set(M.elements())
        inter = els
        for code in range(1, 3**5):
            cs = [(code // 3**i) % 3 for i in range(5)]
            f = GroupRingElem.from_poly_coeffs(
                spec31, 1, [c % 3 for c in _reduce_poly_mod_omega(cs)]
            )
            img = {M.act(f, v) for v in els}
            inter = inter & img
        fast = {tuple(v) for v in M.universal_norms().elements()}
        assert fast == inter

    def test_k2_iterates_past_level(self, spec32):
        # Lambda/J over Z/9: g_1 M = 3M, g_2 M = 0; the intersection must
        # keep iterating past n = 1 to reach 0
        M = FiniteLevelModule(spec32, 1, 1, [[[0, 1]]])
        assert M.universal_norms().order() == 1


def _reduce_poly_mod_omega(cs):
    # oracle helper: T^3 = omega_1 = 0 over F_3 at level 1, so truncate
    out = list(cs[:3])
    return out + [0] * (3 - len(out))


class TestShapes:
    def test_shape_dims_example(self):
        shape = ElementaryShape(1, ((1, 1), (2, 2)))
        assert shape_dims(shape, 5) == [4, 3, 1, 1, 1]

    def test_free_part_persists(self):
        assert shape_dims(ElementaryShape(2), 4) == [2, 2, 2, 2]

    def test_empty(self):
        assert shape_dims(ElementaryShape(0), 3) == [0, 0, 0]

    def test_coprime_part_ignored(self):
        shape = ElementaryShape(1, ((1, 1),), ((1, 1),))
        assert shape_dims(shape, 2) == [2, 1]

    def test_infer_example(self):
        prof = infer_invariants([4, 3, 1, 1])
        assert prof.e == (1, 2, 0)
        assert prof.e_infinity == 1

    def test_infer_constant(self):
        prof = infer_invariants([2, 2, 2])
        assert prof.e == (0, 0)
        assert prof.e_infinity == 2

    def test_infer_simple(self):
        prof = infer_invariants([1, 0, 0])
        assert prof.e == (1, 0)
        assert prof.e_infinity == 0

    def test_infer_rejects_increase(self):
        with pytest.raises(ValueError):
            infer_invariants([1, 2])

    def test_infer_rejects_unstabilised(self):
        with pytest.raises(ValueError):
            infer_invariants([3, 2, 1])

    def test_round_trip_all_small_shapes(self):
        # multiplicities <= 3, block sizes <= 4
        for e_inf in range(4):
            for e1 in range(4):
                for e2 in range(4):
                    for e3 in range(4):
                        for e4 in range(4):
                            blocks = tuple(
                                (i, e)
                                for i, e in ((1, e1), (2, e2), (3, e3), (4, e4))
                                if e
                            )
                            shape = ElementaryShape(e_inf, blocks)
                            dims = shape_dims(shape, 6)
                            prof = infer_invariants(dims)
                            assert prof.e_infinity == e_inf
                            for i in range(1, 5):
                                assert prof.multiplicity(i) == shape.multiplicity(i)

    def test_presented_shape_reproduces_pattern(self, spec31):
        # (Lambda/J) + (Lambda/J^2)^2 at level 1 over F_3: delta orders
        # should show dims (3, 2) in degrees 1 and 2
        shape = ElementaryShape(0, ((1, 1), (2, 2)))
        M = module_from_shape(spec31, 1, shape)
        rep = M.j_filtration(3)
        assert rep.delta_orders == [27, 9, 1]

    def test_presented_free_block_degenerates(self, spec31):
        # a free block at level 1 looks like Lambda/J^3 = F_3[T]/T^3
        shape = ElementaryShape(1)
        M = module_from_shape(spec31, 1, shape)
        rep = M.j_filtration(4)
        assert rep.delta_orders == [3, 3, 3, 1]

    def test_large_j_block_degenerates_like_free(self, spec31):
        # Lambda/J^5 at level 1 truncates identically to a free block
        big = module_from_shape(spec31, 1, ElementaryShape(0, ((5, 1),)))
        free = module_from_shape(spec31, 1, ElementaryShape(1))
        assert big.j_filtration(4).delta_orders == free.j_filtration(4).delta_orders


class TestZpRankEstimate:
    def test_rank_two_stabilized(self):
        # |M (x) Z/p^k| = p^(2k+1) for k = 2, 3, 4
        orders = [3**5, 3**7, 3**9]
        assert zp_rank_estimate(orders, 3) == (2, True)

    def test_two_orders_not_stabilized(self):
        assert zp_rank_estimate([3**5, 3**7], 3) == (2, False)

    def test_fixed_finite_module(self):
        assert zp_rank_estimate([81, 81, 81], 3) == (0, True)

    def test_non_integral_ratio_rejected(self):
        with pytest.raises(IwaheightsError):
            zp_rank_estimate([9, 12], 3)
        with pytest.raises(IwaheightsError):
            zp_rank_estimate([9, 18], 3)

    def test_too_few(self):
        with pytest.raises(ValueError):
            zp_rank_estimate([9], 3)
