"""Semilinear pairings into the module of poles and the derived heights.

Input pairings are data (block rules or explicit tables), not derived from
cochains; validation checks the axioms mechanically before anything
theorem-shaped is computed.  The height pairing composes a pole-valued
pairing with the evaluation functional phi and lands in J/J^2; the derived
tower h^(r) lives on the filtration stages M^(r) x N^(r) with values in
J^r/J^(r+1).

Generator bookkeeping: with the generator gamma0^u the pre-height scales
by u^(-1) (two polar re-expressions contribute u^(-2), the evaluation
functional contributes u), and the basis element gamma0^u - 1 is congruent
to u*(gamma0 - 1) mod J^2; the two effects cancel, which is what makes the
J/J^2-valued height independent of u.  The tests recompute everything with
u = 1 and u = 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from iwaheights import linalg
from iwaheights.errors import IwaheightsError
from iwaheights.iwalg import (
    GroupRingElem,
    IwasawaPoly,
    RingSpec,
    project_to_level,
)
from iwaheights.lambdamod import DEFAULT_ENUM_CAP, FiniteLevelModule, Submodule
from iwaheights.poles import JGradedValue, PoleElem, phi, pole_involution

Vec = Sequence[int]

IOTA_SYMMETRIC = "iota_symmetric"
IOTA_ANTISYMMETRIC = "iota_antisymmetric"
NO_SYMMETRY = "none"
ZERO_PAIRING = "zero"


@dataclass(frozen=True)
class BlockSpec:
    """One block of a block pairing.

    `swapped` makes the block a two-component block paired across the two
    copies with a sign, which flips the symmetry type; `dead` keeps the
    module block but makes its pairing contribution identically zero (a
    negative control).
    """

    level: int
    unit: int = 1
    swapped: bool = False
    dead: bool = False

    @property
    def ncomponents(self) -> int:
        return 2 if self.swapped else 1


def block_module(
    spec: RingSpec,
    blocks: Sequence[BlockSpec],
    enum_cap: int = DEFAULT_ENUM_CAP,
    level: Optional[int] = None,
) -> FiniteLevelModule:
    """The direct sum of group-ring quotients underlying a block pairing.

    `level` may raise the ambient level above the largest block level,
    which keeps differently-shaped modules coordinate-compatible.
    """
    if level is None:
        level = max((b.level for b in blocks), default=0)
    if level < max((b.level for b in blocks), default=0):
        raise ValueError("ambient level below a block level")
    ngens = sum(b.ncomponents for b in blocks)
    relations = []
    zero = GroupRingElem.zero(spec, level)
    idx = 0
    for b in blocks:
        for _ in range(b.ncomponents):
            if b.level < level:
                row = [zero] * ngens
                omega = GroupRingElem.gamma(spec, level, spec.p**b.level) - GroupRingElem.one(
                    spec, level
                )
                row[idx] = omega
                relations.append(row)
            idx += 1
    return FiniteLevelModule(spec, level, ngens, relations, enum_cap)


class BlockPairing:
    """[x, y] = sum over blocks of c * x * iota(y) / (gamma^(p^n) - 1).

    A swapped block pairs its two components as c*(x1*iota(y2) -
    x2*iota(y1)), which is iota-symmetric; plain blocks are
    iota-antisymmetric.  Dead blocks contribute zero.
    """

    kind = "block"

    def __init__(
        self,
        spec: RingSpec,
        blocks: Sequence[BlockSpec],
        enum_cap: int = DEFAULT_ENUM_CAP,
        level: Optional[int] = None,
    ):
        for b in blocks:
            if not spec.is_unit(b.unit):
                raise ValueError(f"block constant {b.unit} is not a unit")
            if b.level < 0:
                raise ValueError("block level must be >= 0")
        self.spec = spec
        self.blocks = tuple(blocks)
        module = block_module(spec, blocks, enum_cap, level=level)
        self.module_left = module
        self.module_right = module

    def declared_symmetry(self) -> str:
        kinds = {b.swapped for b in self.blocks if not b.dead}
        if not kinds:
            return ZERO_PAIRING
        if kinds == {False}:
            return IOTA_ANTISYMMETRIC
        if kinds == {True}:
            return IOTA_SYMMETRIC
        return NO_SYMMETRY

    def value(self, x: Vec, y: Vec) -> PoleElem:
        spec = self.spec
        M = self.module_left
        total = PoleElem.zero(spec)
        idx = 0
        for b in self.blocks:
            if b.dead:
                idx += b.ncomponents
                continue
            if b.swapped:
                x1 = M.component(x, idx).fold_to_level(b.level)
                x2 = M.component(x, idx + 1).fold_to_level(b.level)
                y1 = M.component(y, idx).fold_to_level(b.level)
                y2 = M.component(y, idx + 1).fold_to_level(b.level)
                num = (x1 * y2.involution() - x2 * y1.involution()).scale(b.unit)
                idx += 2
            else:
                xb = M.component(x, idx).fold_to_level(b.level)
                yb = M.component(y, idx).fold_to_level(b.level)
                num = (xb * yb.involution()).scale(b.unit)
                idx += 1
            total = total + PoleElem(spec, b.level, num)
        return total

    def validate(self) -> None:
        validate_pole_pairing(self)


class TablePairing:
    """A pole-valued pairing given by its table on the ambient O-bases."""

    kind = "table"

    def __init__(
        self,
        module_left: FiniteLevelModule,
        module_right: FiniteLevelModule,
        table: Sequence[Sequence[PoleElem]],
        symmetry: str = NO_SYMMETRY,
    ):
        self.spec = module_left.spec
        self.module_left = module_left
        self.module_right = module_right
        self.table = [list(row) for row in table]
        self._symmetry = symmetry
        if len(self.table) != module_left.dim or any(
            len(r) != module_right.dim for r in self.table
        ):
            raise ValueError("table has the wrong shape")

    def declared_symmetry(self) -> str:
        return self._symmetry

    def value(self, x: Vec, y: Vec) -> PoleElem:
        total = PoleElem.zero(self.spec)
        for a, xa in enumerate(x):
            if xa == 0:
                continue
            row = self.table[a]
            for b, yb in enumerate(y):
                if yb == 0:
                    continue
                total = total + row[b].scale(xa * yb)
        return total

    def validate(self) -> None:
        # the table must kill the relation span on both sides
        M, N = self.module_left, self.module_right
        for rel in M.rel_rows:
            for b in range(N.dim):
                v = self.value(rel, [int(c == b) for c in range(N.dim)])
                if not v.is_zero():
                    raise IwaheightsError("pairing does not vanish on left relations")
        for rel in N.rel_rows:
            for a in range(M.dim):
                v = self.value([int(c == a) for c in range(M.dim)], rel)
                if not v.is_zero():
                    raise IwaheightsError("pairing does not vanish on right relations")
        validate_pole_pairing(self)


def validate_pole_pairing(pairing) -> None:
    """Check semilinearity and the declared symmetry on spanning sets."""
    M = pairing.module_left
    N = pairing.module_right
    spec = pairing.spec
    tM = M.T_class()
    tN = N.T_class()
    tN_iota = tN.involution()
    basis_left = [tuple(int(c == a) for c in range(M.dim)) for a in range(M.dim)]
    basis_right = [tuple(int(c == b) for c in range(N.dim)) for b in range(N.dim)]
    for x in basis_left:
        for y in basis_right:
            v = pairing.value(x, y)
            left = pairing.value(M.act(tM, x), y)
            mid = v.act_group(tM)
            right = pairing.value(x, N.act(tN_iota, y))
            if left != mid or right != mid:
                raise IwaheightsError("pairing is not semilinear")
    sym = pairing.declared_symmetry()
    if sym in (IOTA_SYMMETRIC, IOTA_ANTISYMMETRIC, ZERO_PAIRING):
        sign = 1 if sym == IOTA_SYMMETRIC else -1
        for x in basis_left:
            for y in basis_right:
                v = pairing.value(x, y)
                w = pole_involution(pairing.value(y, x))
                want = w if sign == 1 else -w
                if sym == ZERO_PAIRING:
                    if not v.is_zero():
                        raise IwaheightsError("declared zero pairing is not zero")
                elif v != want:
                    raise IwaheightsError(f"declared symmetry {sym} fails")


class HeightPairing:
    """The J/J^2-valued height attached to a pole-valued pairing.

    The coefficient is u^(-1) * phi_u([x, y]) for the chosen generator
    exponent u; the value does not depend on u.
    """

    def __init__(self, pairing, u: int = 1, validate: bool = True):
        spec = pairing.spec
        if not spec.is_unit(u):
            raise ValueError("generator exponent must be a unit")
        if validate:
            pairing.validate()
        self.pairing = pairing
        self.spec = spec
        self.u = u
        self._u_inv = spec.unit_inverse(u % spec.modulus)

    @property
    def module_left(self) -> FiniteLevelModule:
        return self.pairing.module_left

    @property
    def module_right(self) -> FiniteLevelModule:
        return self.pairing.module_right

    def coeff(self, x: Vec, y: Vec) -> int:
        v = self.pairing.value(x, y)
        return (self._u_inv * phi(self.u, v)) % self.spec.modulus

    def value(self, x: Vec, y: Vec) -> JGradedValue:
        return JGradedValue(self.spec, 1, self.coeff(x, y))

    def left_kernel(self) -> Submodule:
        """{x : h(x, .) = 0}, by elimination against the right basis."""
        M, N = self.module_left, self.module_right
        rows = [
            [self.coeff([int(c == a) for c in range(M.dim)], [int(c == b) for c in range(N.dim)]) for a in range(M.dim)]
            for b in range(N.dim)
        ]
        gens = linalg.right_kernel(rows, M.dim, self.spec.p, self.spec.k)
        return M.submodule(gens)

    def right_kernel(self) -> Submodule:
        M, N = self.module_left, self.module_right
        rows = [
            [self.coeff([int(c == a) for c in range(M.dim)], [int(c == b) for c in range(N.dim)]) for b in range(N.dim)]
            for a in range(M.dim)
        ]
        gens = linalg.right_kernel(rows, N.dim, self.spec.p, self.spec.k)
        return N.submodule(gens)


class DerivedHeightPairing:
    """h^(r) on the filtration stages, valued in J^r/J^(r+1).

    h^(1) is the restriction of h to the J-torsion; for r > 1 the left
    argument is pulled back through (gamma^u - 1)^(r-1) inside M[J^r].
    """

    def __init__(self, h: HeightPairing, r: int):
        if r < 1:
            raise ValueError("derived heights start at r = 1")
        self.h = h
        self.r = r
        self.spec = h.spec
        M, N = h.module_left, h.module_right
        self.left_stage = M.filtration_stage(r)
        self.right_stage = N.filtration_stage(r)
        self.left_torsion = M.j_torsion(r)
        self._shift_matrix = self._power_matrix(M)

    def _power_matrix(self, M: FiniteLevelModule):
        t = M.T_class(self.h.u)
        x = GroupRingElem.one(self.spec, M.level)
        for _ in range(self.r - 1):
            x = x * t
        return M.action_matrix(x)

    def value(self, x: Vec, y: Vec) -> JGradedValue:
        M = self.h.module_left
        if not self.left_stage.contains(x):
            raise IwaheightsError(f"left argument is not in the stage-{self.r} filtration")
        if not self.right_stage.contains(y):
            raise IwaheightsError(f"right argument is not in the stage-{self.r} filtration")
        m = self.spec.modulus
        gens = self.left_torsion.hrows
        rows = [linalg.matvec(self._shift_matrix, list(g), m) for g in gens]
        sol = linalg.solve_combination(rows + [list(r) for r in M.rel_rows], list(x), self.spec.p, self.spec.k)
        if sol is None:
            raise IwaheightsError("no torsion preimage found (filtration data broken)")
        w = [0] * M.dim
        for c, g in zip(sol, gens):
            if c:
                w = [(a + c * b) % m for a, b in zip(w, g)]
        coeff = pow(self.h.u, self.r - 1, m) * self.h.coeff(w, y)
        return JGradedValue(self.spec, self.r, coeff)

    def check_well_defined(self) -> bool:
        """Preimage independence: two torsion preimages of the same stage
        element differ by ker((gamma^u-1)^(r-1)) inside M[J^r], so it
        suffices that h kills that kernel against the right stage."""
        M = self.h.module_left
        spec = self.spec
        ker = linalg.preimage_span(
            self._shift_matrix,
            M.rel_rows or [[0] * M.dim],
            M.dim,
            spec.p,
            spec.k,
        )
        ambiguity = M.submodule(ker).intersect(self.left_torsion)
        right_gens = self.right_stage.gens()
        return all(
            self.h.coeff(t, y) == 0 for t in ambiguity.gens() for y in right_gens
        )

    def left_kernel_elements(self) -> set:
        right_gens = self.right_stage.gens()
        out = set()
        for x in self.left_stage.elements():
            if all(self.value(x, y).is_zero() for y in right_gens):
                out.add(tuple(x))
        return out

    def right_kernel_elements(self) -> set:
        left_gens = self.left_stage.gens()
        out = set()
        for y in self.right_stage.elements():
            if all(self.value(x, y).is_zero() for x in left_gens):
                out.add(tuple(y))
        return out


def derived_height(h: HeightPairing, r: int) -> DerivedHeightPairing:
    return DerivedHeightPairing(h, r)


def restricted_kernel_check(
    h: HeightPairing,
    lam0: Union[IwasawaPoly, GroupRingElem],
    lam1: Union[IwasawaPoly, GroupRingElem],
) -> dict:
    """Brute-force kernels of h restricted to M[lam0] x N[lam1], compared
    with the predicted images of multiplication by the twisted partners."""
    M, N = h.module_left, h.module_right

    def cls(lam, module):
        if isinstance(lam, IwasawaPoly):
            return project_to_level(lam, module.level)
        return lam

    l0M = cls(lam0, M)
    l1N = cls(lam1, N)
    l0iota = l0M.involution()
    l1iota = l1N.involution()

    tor_left = M.torsion(l0M)
    tor_right = N.torsion(l1N)
    left_els = tor_left.elements()
    right_els = tor_right.elements()

    brute_left = {
        tuple(x) for x in left_els if all(h.coeff(x, y) == 0 for y in right_els)
    }
    brute_right = {
        tuple(y) for y in right_els if all(h.coeff(x, y) == 0 for x in left_els)
    }

    tor_prod_left = M.torsion(l0M * l1iota)
    pred_left = M.submodule([M.act(l1iota, g) for g in tor_prod_left.gens()] or [M.zero()])
    tor_prod_right = N.torsion(l0iota * l1N)
    pred_right = N.submodule([N.act(l0iota, g) for g in tor_prod_right.gens()] or [N.zero()])

    return {
        "left_kernel": sorted(brute_left),
        "right_kernel": sorted(brute_right),
        "predicted_left": sorted(tuple(v) for v in pred_left.elements()),
        "predicted_right": sorted(tuple(v) for v in pred_right.elements()),
        "left_match": brute_left == {tuple(v) for v in pred_left.elements()},
        "right_match": brute_right == {tuple(v) for v in pred_right.elements()},
    }


def twist_equivariance_check(
    h: HeightPairing,
    sigma_left: Sequence[Sequence[int]],
    sigma_right: Sequence[Sequence[int]],
    omega: int,
) -> bool:
    """Check h(sigma x, sigma y) = omega * h(x, y) on full spanning sets.

    sigma must be a pair of module automorphisms conjugating the group
    action by gamma -> gamma^omega; both conditions are validated first.
    """
    M, N = h.module_left, h.module_right
    spec = h.spec
    m = spec.modulus
    for sigma, module in ((sigma_left, M), (sigma_right, N)):
        if not linalg.det_is_unit([list(r) for r in sigma], spec.p):
            raise IwaheightsError("sigma is not an automorphism")
        for rel in module.rel_rows:
            if any(module.canon(linalg.matvec(sigma, list(rel), m))):
                raise IwaheightsError("sigma does not preserve the relations")
        if omega % m not in (1, m - 1):
            raise IwaheightsError("only omega = +-1 twists are modelled")
        gam = module.action_matrix(module.gamma_class())
        gam_omega = module.action_matrix(
            module.gamma_class().involution() if omega % m == m - 1 else module.gamma_class()
        )
        lhs = linalg.matmul(sigma, gam, m)
        rhs = linalg.matmul(gam_omega, sigma, m)
        for c in range(module.dim):
            e = [int(i == c) for i in range(module.dim)]
            if module.canon(linalg.matvec(lhs, e, m)) != module.canon(
                linalg.matvec(rhs, e, m)
            ):
                raise IwaheightsError("sigma does not conjugate gamma to gamma^omega")
    for a in range(M.dim):
        x = [int(c == a) for c in range(M.dim)]
        sx = linalg.matvec(sigma_left, x, m)
        for b in range(N.dim):
            y = [int(c == b) for c in range(N.dim)]
            sy = linalg.matvec(sigma_right, y, m)
            if h.coeff(sx, sy) != (omega * h.coeff(x, y)) % m:
                return False
    return True
