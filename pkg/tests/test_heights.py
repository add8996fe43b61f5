"""Height pairings and the derived tower: the core desk-scale witnesses.

The concrete single-block instance over F_3 (the module F_3[T]/(T^3) with
pairing x*iota(y)/(gamma^3-1)) is checked coefficient by coefficient:
h^(1) vanishes on span{T^2}^2, h^(3)(T^2, T^2) is the unit (gamma-1)^3,
and the kernel chain is span{T^2}, span{T^2}, span{T^2}, 0.
"""

import random

import pytest

from iwaheights.errors import IwaheightsError
from iwaheights.heights import (
    BlockPairing,
    BlockSpec,
    HeightPairing,
    TablePairing,
    derived_height,
    restricted_kernel_check,
    twist_equivariance_check,
)
from iwaheights.iwalg import GroupRingElem, IwasawaPoly
from iwaheights.poles import PoleElem


def single_block(spec, level=1, unit=1):
    return BlockPairing(spec, [BlockSpec(level, unit)])


def elem_from_poly(M, poly, gen=0):
    comps = [GroupRingElem.zero(M.spec, M.level)] * M.ngens
    comps[gen] = GroupRingElem.from_poly_coeffs(M.spec, M.level, poly)
    return M.from_components(comps)


def iota_matrix(M, sign=1):
    """Blockwise coefficient involution of a block module, times a sign."""
    m = M.spec.modulus
    n = M.block
    mat = [[0] * M.dim for _ in range(M.dim)]
    for i in range(M.ngens):
        for a in range(n):
            mat[i * n + a][i * n + ((-a) % n)] = sign % m
    return mat


class TestBlockPairing:
    def test_unit_numerator_nonzero(self, spec31):
        bp = single_block(spec31)
        one = elem_from_poly(bp.module_left, [1])
        assert not bp.value(one, one).is_zero()

    def test_omega_divisible_product_is_zero(self, spec31):
        bp = single_block(spec31)
        M = bp.module_left
        # x = T^2, y = T^2: x * iota(y) has T-valuation >= 4 > 3
        t2 = elem_from_poly(M, [0, 0, 1])
        assert bp.value(t2, t2).is_zero()

    def test_semilinearity_random(self, spec31):
        bp = single_block(spec31)
        M = bp.module_left
        rng = random.Random(3)
        tcl = M.T_class()
        for _ in range(40):
            x = M.canon([rng.randrange(3) for _ in range(M.dim)])
            y = M.canon([rng.randrange(3) for _ in range(M.dim)])
            v = bp.value(x, y)
            assert bp.value(M.act(tcl, x), y) == v.act_group(tcl)
            assert bp.value(x, M.act(tcl.involution(), y)) == v.act_group(tcl)

    def test_validation_passes(self, spec31, spec32):
        for spec in (spec31, spec32):
            single_block(spec).validate()
            BlockPairing(spec, [BlockSpec(1, 1, swapped=True)]).validate()
            BlockPairing(spec, [BlockSpec(0), BlockSpec(1)]).validate()

    def test_declared_symmetry(self, spec31):
        assert single_block(spec31).declared_symmetry() == "iota_antisymmetric"
        assert (
            BlockPairing(spec31, [BlockSpec(1, 1, swapped=True)]).declared_symmetry()
            == "iota_symmetric"
        )
        assert (
            BlockPairing(spec31, [BlockSpec(1, dead=True)]).declared_symmetry()
            == "zero"
        )

    def test_dead_block_contributes_nothing(self, spec31):
        bp = BlockPairing(spec31, [BlockSpec(1, dead=True)])
        M = bp.module_left
        for x in M.elements():
            for y in (M.gen(0),):
                assert bp.value(x, y).is_zero()


class TestHeightPairing:
    def test_generator_independence(self, spec31, spec32):
        for spec in (spec31, spec32):
            for blocks in (
                [BlockSpec(1)],
                [BlockSpec(1, 1, swapped=True)],
                [BlockSpec(0), BlockSpec(1)],
            ):
                bp = BlockPairing(spec, blocks)
                h1 = HeightPairing(bp, u=1, validate=False)
                h2 = HeightPairing(bp, u=2, validate=False)
                M = bp.module_left
                rng = random.Random(5)
                for _ in range(30):
                    x = M.canon([rng.randrange(spec.modulus) for _ in range(M.dim)])
                    y = M.canon([rng.randrange(spec.modulus) for _ in range(M.dim)])
                    assert h1.coeff(x, y) == h2.coeff(x, y)

    def test_linearity_left_zero(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        assert h.coeff(M.zero(), M.gen(0)) == 0

    def test_symmetry_conversion(self, spec31):
        # iota-antisymmetric input gives a symmetric height,
        # iota-symmetric input gives an alternating height
        anti = HeightPairing(single_block(spec31))
        M = anti.module_left
        rng = random.Random(7)
        for _ in range(30):
            x = M.canon([rng.randrange(3) for _ in range(M.dim)])
            y = M.canon([rng.randrange(3) for _ in range(M.dim)])
            assert anti.coeff(x, y) == anti.coeff(y, x)
        sym = HeightPairing(BlockPairing(spec31, [BlockSpec(1, 1, swapped=True)]))
        N = sym.module_left
        for _ in range(30):
            x = N.canon([rng.randrange(3) for _ in range(N.dim)])
            y = N.canon([rng.randrange(3) for _ in range(N.dim)])
            assert sym.coeff(x, y) == (-sym.coeff(y, x)) % 3
            assert sym.coeff(x, x) == 0

    def test_global_kernel_is_universal_norms(self, spec31, spec32):
        for spec in (spec31, spec32):
            for blocks in (
                [BlockSpec(1)],
                [BlockSpec(0), BlockSpec(1)],
                [BlockSpec(1, 2, swapped=True)],
            ):
                h = HeightPairing(BlockPairing(spec, blocks), validate=False)
                M = h.module_left
                assert h.left_kernel().order() == M.universal_norms().order() == 1
                assert h.right_kernel().order() == 1

    def test_level_zero_block_pairs_honestly(self, spec31):
        # Lambda_0 = O with h(x, y) = x*y*(gamma-1): nondegenerate
        h = HeightPairing(BlockPairing(spec31, [BlockSpec(0)]))
        M = h.module_left
        one = M.gen(0)
        assert h.coeff(one, one) == 1
        assert h.left_kernel().order() == 1


class TestDerivedTower:
    def test_concrete_witness_block_f3(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        t2 = elem_from_poly(M, [0, 0, 1])
        # h^(1) vanishes identically on span{T^2} x span{T^2}
        d1 = derived_height(h, 1)
        assert d1.left_stage.order() == 3 and d1.left_stage.contains(t2)
        assert d1.value(t2, t2).is_zero()
        # h^(3)(T^2, T^2) = 1 * (gamma-1)^3, a unit multiple
        d3 = derived_height(h, 3)
        v = d3.value(t2, t2)
        assert v.degree == 3
        assert v.coeff == 1
        # oracle: the preimage w = 1 satisfies T^2 w = T^2, and
        # phi(1, [1, T^2]) is the identity coefficient of the class of T^2
        one = elem_from_poly(M, [1])
        assert h.coeff(one, t2) == 1

    def test_r1_is_restriction(self, spec31, spec32):
        for spec in (spec31, spec32):
            h = HeightPairing(single_block(spec), validate=False)
            M = h.module_left
            d1 = derived_height(h, 1)
            for x in d1.left_stage.elements():
                for y in d1.right_stage.elements():
                    assert d1.value(x, y).coeff == h.coeff(x, y)

    def test_well_defined_across_preimages(self, spec31):
        # every preimage w with T^2 w = x gives the same h^(3) value
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        t2 = elem_from_poly(M, [0, 0, 1])
        d3 = derived_height(h, 3)
        target = d3.value(t2, t2).coeff
        tcl = M.T_class()
        t2cl = GroupRingElem.one(spec31, 1)
        shift = M.action_matrix(tcl * tcl)
        import iwaheights.linalg as linalg

        for w in M.elements():
            img = M.canon(linalg.matvec(shift, list(w), 3))
            if img == t2:
                assert h.coeff(w, t2) == target

    def test_kernel_chain_single_block(self, spec31):
        # frozen: stages span{T^2}, span{T^2}, span{T^2}, 0 and kernels match
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        expected_orders = {1: 3, 2: 3, 3: 3, 4: 1}
        for r in (1, 2, 3, 4):
            assert M.filtration_stage(r).order() == expected_orders[r]
        for r in (1, 2, 3):
            d = derived_height(h, r)
            kernel = d.left_kernel_elements()
            stage_next = {tuple(v) for v in M.filtration_stage(r + 1).elements()}
            assert kernel == stage_next
            assert d.right_kernel_elements() == stage_next

    def test_kernel_chain_all_block_instances(self, spec31, spec32):
        cases = [
            (spec31, [BlockSpec(1)]),
            (spec31, [BlockSpec(0), BlockSpec(1)]),
            (spec31, [BlockSpec(1, 1, swapped=True)]),
            (spec32, [BlockSpec(1)]),
        ]
        for spec, blocks in cases:
            h = HeightPairing(BlockPairing(spec, blocks), validate=False)
            M = h.module_left
            for r in range(1, 5):
                d = derived_height(h, r)
                assert d.check_well_defined()
                nxt = {tuple(v) for v in M.filtration_stage(r + 1).elements()}
                assert d.left_kernel_elements() == nxt
                assert d.right_kernel_elements() == nxt

    def test_sign_tower(self, spec31, spec32):
        # iota-antisymmetric: h^(r)(x,y) = (-1)^(r+1) h^(r)(y,x)
        # iota-symmetric:     h^(r)(x,y) = (-1)^r     h^(r)(y,x)
        for spec in (spec31, spec32):
            for blocks, parity in (
                ([BlockSpec(1)], 1),
                ([BlockSpec(1, 1, swapped=True)], 0),
            ):
                h = HeightPairing(BlockPairing(spec, blocks), validate=False)
                for r in range(1, 5):
                    d = derived_height(h, r)
                    sign = (-1) ** (r + parity)
                    for x in d.left_stage.elements():
                        for y in d.right_stage.elements():
                            lhs = d.value(x, y).coeff
                            rhs = (sign * d.value(y, x).coeff) % spec.modulus
                            assert lhs == rhs

    def test_intersection_of_stages_is_norms_cap_torsion(self, spec31, spec32):
        for spec in (spec31, spec32):
            for blocks in ([BlockSpec(1)], [BlockSpec(0), BlockSpec(1)]):
                M = BlockPairing(spec, blocks).module_left
                inter = M.filtration_stage(1)
                r = 2
                while True:
                    stage = M.filtration_stage(r)
                    inter = inter.intersect(stage)
                    if stage.order() == 1:
                        break
                    r += 1
                norms_cap = M.universal_norms().intersect(M.j_torsion(1))
                assert inter == norms_cap

    def test_generator_independence_of_tower(self, spec31):
        bp = single_block(spec31)
        h1 = HeightPairing(bp, u=1, validate=False)
        h2 = HeightPairing(bp, u=2, validate=False)
        for r in (1, 2, 3):
            d1, d2 = derived_height(h1, r), derived_height(h2, r)
            for x in d1.left_stage.elements():
                for y in d1.right_stage.elements():
                    assert d1.value(x, y).coeff == d2.value(x, y).coeff

    def test_stage_membership_enforced(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        one = elem_from_poly(M, [1])
        d2 = derived_height(h, 2)
        with pytest.raises(IwaheightsError):
            d2.value(one, one)

    def test_parity_of_even_stage_quotients(self, spec31):
        # on iota-antisymmetric instances with M = N and k = 1, the
        # nondegenerate quotient in even degree is even dimensional
        for blocks in ([BlockSpec(1)], [BlockSpec(0), BlockSpec(1)], [BlockSpec(2)]):
            M = BlockPairing(spec31, blocks).module_left
            rep = M.j_filtration(6, check_generator_independence=False)
            for r in (2, 4):
                assert rep.stage_quotient_log_order(r) % 2 == 0


class TestRestrictedKernels:
    def test_single_block_T_T(self, spec31):
        h = HeightPairing(single_block(spec31))
        rep = restricted_kernel_check(h, IwasawaPoly.T(spec31), IwasawaPoly.T(spec31))
        assert rep["left_match"] and rep["right_match"]
        # left kernel is all of M[T] = span{T^2} (h^(1) vanishes there)
        assert len(rep["left_kernel"]) == 3

    def test_unit_torsion_trivial(self, spec31):
        h = HeightPairing(single_block(spec31))
        rep = restricted_kernel_check(h, IwasawaPoly.one(spec31), IwasawaPoly.T(spec31))
        assert rep["left_kernel"] == [tuple(h.module_left.zero())]
        assert rep["left_match"] and rep["right_match"]

    def test_omega_torsion_full(self, spec31):
        h = HeightPairing(single_block(spec31))
        om = IwasawaPoly(spec31, [0, 0, 0, 1])
        rep = restricted_kernel_check(h, om, om)
        assert rep["left_match"] and rep["right_match"]

    def test_random_mod9(self, spec32):
        h = HeightPairing(single_block(spec32), validate=False)
        rep = restricted_kernel_check(h, IwasawaPoly.T(spec32), IwasawaPoly.T(spec32))
        assert rep["left_match"] and rep["right_match"]


class TestTwistEquivariance:
    def test_identity_trivial(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        ident = [[int(i == j) for j in range(M.dim)] for i in range(M.dim)]
        assert twist_equivariance_check(h, ident, ident, 1) is True

    def test_anticyclotomic_toy_single_block(self, spec31):
        # sigma pair (iota, -iota) realises the omega = -1 twist
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        assert (
            twist_equivariance_check(h, iota_matrix(M, 1), iota_matrix(M, -1), -1)
            is True
        )

    def test_level_zero_swap_toy(self, spec31):
        # two level-0 blocks with constants (1, -1) and tau = swap
        bp = BlockPairing(spec31, [BlockSpec(0, 1), BlockSpec(0, -1)])
        h = HeightPairing(bp)
        swap = [[0, 1], [1, 0]]
        assert twist_equivariance_check(h, swap, swap, -1) is True

    def test_plain_iota_pair_fails_minus_one(self, spec31):
        # (iota, iota) conjugates correctly but has the wrong sign
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        assert (
            twist_equivariance_check(h, iota_matrix(M, 1), iota_matrix(M, 1), -1)
            is False
        )

    def test_non_automorphism_rejected(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        bad = [[0] * M.dim for _ in range(M.dim)]
        with pytest.raises(IwaheightsError):
            twist_equivariance_check(h, bad, bad, 1)

    def test_non_conjugating_rejected(self, spec31):
        h = HeightPairing(single_block(spec31))
        M = h.module_left
        ident = [[int(i == j) for j in range(M.dim)] for i in range(M.dim)]
        with pytest.raises(IwaheightsError):
            twist_equivariance_check(h, ident, ident, -1)


class TestTablePairing:
    def test_table_reproduces_block(self, spec31):
        bp = single_block(spec31)
        M = bp.module_left
        table = [
            [
                bp.value(
                    [int(c == a) for c in range(M.dim)],
                    [int(c == b) for c in range(M.dim)],
                )
                for b in range(M.dim)
            ]
            for a in range(M.dim)
        ]
        tp = TablePairing(M, M, table, symmetry="iota_antisymmetric")
        tp.validate()
        rng = random.Random(11)
        for _ in range(20):
            x = M.canon([rng.randrange(3) for _ in range(M.dim)])
            y = M.canon([rng.randrange(3) for _ in range(M.dim)])
            assert tp.value(x, y) == bp.value(x, y)

    def test_tampered_table_fails_validation(self, spec31):
        bp = single_block(spec31)
        M = bp.module_left
        table = [
            [
                bp.value(
                    [int(c == a) for c in range(M.dim)],
                    [int(c == b) for c in range(M.dim)],
                )
                for b in range(M.dim)
            ]
            for a in range(M.dim)
        ]
        table[0][0] = table[0][0] + PoleElem(
            spec31, 1, GroupRingElem.one(spec31, 1)
        )
        tp = TablePairing(M, M, table, symmetry="iota_antisymmetric")
        with pytest.raises(IwaheightsError):
            tp.validate()
