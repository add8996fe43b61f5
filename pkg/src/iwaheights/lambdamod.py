"""Finitely presented modules over a finite-level group ring.

A module is presented as Lambda_N^g modulo the Lambda_N-span of relation
rows.  Internally everything is a submodule of the ambient O-module
O^(g*p^N) represented by a Howell basis, so membership, kernels, images,
intersections, and orders are all exact.  Enumeration-backed operations
(the oracles of record) refuse to run above a configurable element cap.

The J-adic machinery lives here: J-power torsion M[J^r], the graded pieces
delta_r, the filtration stages M^(r) = (gamma-1)^(r-1) M[J^r], universal
norms, and the invariant bookkeeping for elementary module shapes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from iwaheights import linalg
from iwaheights.errors import EnumerationCapError, IwaheightsError
from iwaheights.iwalg import (
    GroupRingElem,
    IwasawaPoly,
    RingSpec,
    project_to_level,
)
from iwaheights.poles import norm_class

DEFAULT_ENUM_CAP = 3**10

Vec = tuple[int, ...]


class FiniteLevelModule:
    """Lambda_N^g / (relation rows), as an explicit O-module quotient."""

    def __init__(
        self,
        spec: RingSpec,
        level: int,
        ngens: int,
        relations: Sequence[Sequence[Union[GroupRingElem, Sequence[int]]]] = (),
        enum_cap: int = DEFAULT_ENUM_CAP,
    ):
        self.spec = spec
        self.level = level
        self.ngens = ngens
        self.block = spec.p**level
        self.dim = ngens * self.block
        self.enum_cap = enum_cap
        rows = []
        for rel in relations:
            if len(rel) != ngens:
                raise ValueError("relation row must have one entry per generator")
            comps = [self._coerce(entry) for entry in rel]
            for shift in range(self.block):
                row = []
                for comp in comps:
                    shifted = comp * GroupRingElem.gamma(spec, level, shift)
                    row.extend(shifted.coeffs)
                rows.append(row)
        self.rel_rows = linalg.howell(rows, spec.p, spec.k) if rows else []
        self._rel_span = linalg.span_size(self.rel_rows, spec.p, spec.k)
        self.size = spec.modulus**self.dim // self._rel_span

    def _coerce(self, entry) -> GroupRingElem:
        if isinstance(entry, GroupRingElem):
            if entry.level != self.level or entry.spec != self.spec:
                raise ValueError("relation entry at the wrong level")
            return entry
        return GroupRingElem.from_poly_coeffs(self.spec, self.level, list(entry))

    # -- elements -------------------------------------------------------
    def canon(self, vec: Sequence[int]) -> Vec:
        return tuple(linalg.reduce_vector(list(vec), self.rel_rows, self.spec.p, self.spec.k))

    def zero(self) -> Vec:
        return (0,) * self.dim

    def gen(self, i: int) -> Vec:
        return self.canon([1 if c == i * self.block else 0 for c in range(self.dim)])

    def from_components(self, comps: Sequence[GroupRingElem]) -> Vec:
        if len(comps) != self.ngens:
            raise ValueError("need one component per generator")
        flat: list[int] = []
        for c in comps:
            flat.extend(c.coeffs)
        return self.canon(flat)

    def component(self, vec: Sequence[int], i: int) -> GroupRingElem:
        return GroupRingElem(
            self.spec, self.level, vec[i * self.block : (i + 1) * self.block]
        )

    def add(self, a: Sequence[int], b: Sequence[int]) -> Vec:
        m = self.spec.modulus
        return self.canon([(x + y) % m for x, y in zip(a, b)])

    def neg(self, a: Sequence[int]) -> Vec:
        m = self.spec.modulus
        return self.canon([(-x) % m for x in a])

    def scale(self, c: int, a: Sequence[int]) -> Vec:
        m = self.spec.modulus
        return self.canon([(c * x) % m for x in a])

    def elements(self) -> list[Vec]:
        """All canonical representatives; refuses above the element cap."""
        if self.size > self.enum_cap:
            raise EnumerationCapError(
                f"module has {self.size} elements, above the cap {self.enum_cap}"
            )
        m = self.spec.modulus
        ranges = [m] * self.dim
        for r in self.rel_rows:
            c = next(i for i, x in enumerate(r) if x)
            ranges[c] = r[c]
        out = [[]]
        for bound in ranges:
            out = [prefix + [v] for prefix in out for v in range(bound)]
        return [tuple(v) for v in out]

    # -- group-ring action ----------------------------------------------
    def action_matrix(self, x: GroupRingElem) -> list[list[int]]:
        if x.level != self.level:
            x = x.fold_to_level(self.level) if x.level > self.level else GroupRingElem(
                self.spec, self.level, x.coeffs
            )
        n = self.block
        rows = [[0] * self.dim for _ in range(self.dim)]
        for i in range(self.ngens):
            for a in range(n):
                row = rows[i * n + a]
                for j in range(n):
                    row[i * n + j] = x.coeffs[(a - j) % n]
        return rows

    def act(self, x: GroupRingElem, vec: Sequence[int]) -> Vec:
        return self.canon(linalg.matvec(self.action_matrix(x), list(vec), self.spec.modulus))

    def act_poly(self, f: IwasawaPoly, vec: Sequence[int]) -> Vec:
        return self.act(project_to_level(f, self.level), vec)

    def gamma_class(self, u: int = 1) -> GroupRingElem:
        return GroupRingElem.gamma(self.spec, self.level, u)

    def T_class(self, u: int = 1) -> GroupRingElem:
        """Class of (1+T)^u - 1 at this level (u = 1 gives gamma - 1)."""
        return self.gamma_class(u) - GroupRingElem.one(self.spec, self.level)

    # -- submodules -------------------------------------------------------
    def submodule(self, vectors: Iterable[Sequence[int]]) -> "Submodule":
        rows = [list(v) for v in vectors] + [list(r) for r in self.rel_rows]
        return Submodule(self, linalg.howell(rows, self.spec.p, self.spec.k))

    def zero_submodule(self) -> "Submodule":
        return Submodule(self, [list(r) for r in self.rel_rows])

    def full_submodule(self) -> "Submodule":
        return self.submodule([[int(c == i) for c in range(self.dim)] for i in range(self.dim)])

    def torsion(self, f: Union[IwasawaPoly, GroupRingElem]) -> "Submodule":
        """Kernel of multiplication by f: the f-torsion submodule."""
        if isinstance(f, IwasawaPoly):
            f = project_to_level(f, self.level)
        A = self.action_matrix(f)
        gens = linalg.preimage_span(A, self.rel_rows or [[0] * self.dim], self.dim, self.spec.p, self.spec.k)
        return self.submodule(gens)

    def image_of_action(self, x: Union[IwasawaPoly, GroupRingElem]) -> "Submodule":
        if isinstance(x, IwasawaPoly):
            x = project_to_level(x, self.level)
        A = self.action_matrix(x)
        cols = [[A[r][c] for r in range(self.dim)] for c in range(self.dim)]
        return self.submodule(cols)

    # -- the J-adic machinery ---------------------------------------------
    def j_torsion(self, r: int) -> "Submodule":
        t = self.T_class()
        x = GroupRingElem.one(self.spec, self.level)
        for _ in range(r):
            x = x * t
        return self.torsion(x)

    def filtration_stage(self, r: int, u: int = 1) -> "Submodule":
        """M^(r): the image of M[J^r] under (gamma^u - 1)^(r-1)."""
        tor = self.j_torsion(r)
        t = self.T_class(u)
        x = GroupRingElem.one(self.spec, self.level)
        for _ in range(r - 1):
            x = x * t
        A = self.action_matrix(x)
        m = self.spec.modulus
        imgs = [linalg.matvec(A, list(g), m) for g in tor.hrows]
        return self.submodule(imgs)

    def j_filtration(self, r_max: int, check_generator_independence: bool = True) -> "FiltrationReport":
        torsions = []
        stages = []
        delta_orders = []
        prev_order = 1
        for r in range(1, r_max + 1):
            tor = self.j_torsion(r)
            torsions.append(tor)
            delta_orders.append(tor.order() // prev_order)
            prev_order = tor.order()
            stage = self.filtration_stage(r)
            if check_generator_independence:
                alt = self.filtration_stage(r, u=2)
                if stage != alt:
                    raise IwaheightsError(
                        f"filtration stage {r} depends on the chosen generator"
                    )
            stages.append(stage)
        for r in range(1, r_max):
            if not stages[r].is_contained_in(stages[r - 1]):
                raise IwaheightsError("filtration stages fail to decrease")
        return FiltrationReport(
            module=self,
            r_max=r_max,
            torsions=torsions,
            stages=stages,
            delta_orders=delta_orders,
            universal=self.universal_norms(),
        )

    def universal_norms(self) -> "Submodule":
        """Intersection of the images of all norm elements, run to stability."""
        current = self.full_submodule()
        n = 1
        stable_needed = self.level + self.spec.k + 2
        while n <= stable_needed:
            img = self.image_of_action(norm_class(self.spec, n, self.level))
            nxt = current.intersect(img)
            if nxt == current and n > self.level:
                return current
            current = nxt
            n += 1
        return current


@dataclass
class Submodule:
    """A submodule of a finite-level module, as a Howell basis containing
    the relation span."""

    module: FiniteLevelModule
    hrows: list[list[int]]

    def order(self) -> int:
        """Number of elements of the submodule inside the quotient module."""
        return linalg.span_size(self.hrows, self.module.spec.p, self.module.spec.k) // self.module._rel_span

    def contains(self, vec: Sequence[int]) -> bool:
        return linalg.span_contains(list(vec), self.hrows, self.module.spec.p, self.module.spec.k)

    def gens(self) -> list[Vec]:
        """Canonical nonzero generators of the image in the quotient."""
        out = []
        seen = set()
        for r in self.hrows:
            c = self.module.canon(r)
            if any(c) and c not in seen:
                seen.add(c)
                out.append(c)
        return out

    def elements(self) -> list[Vec]:
        """All elements (as canonical quotient representatives), by closure."""
        cap = self.module.enum_cap
        if self.order() > cap:
            raise EnumerationCapError(f"submodule order {self.order()} above cap {cap}")
        m = self.module.spec.modulus
        seen = {self.module.zero()}
        frontier = [self.module.zero()]
        gens = self.gens()
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.module.add(x, g)
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        return sorted(seen)

    def intersect(self, other: "Submodule") -> "Submodule":
        rows = linalg.span_intersection(self.hrows, other.hrows, self.module.spec.p, self.module.spec.k)
        return self.module.submodule(rows)

    def sum(self, other: "Submodule") -> "Submodule":
        return self.module.submodule(self.hrows + other.hrows)

    def is_contained_in(self, other: "Submodule") -> bool:
        return all(other.contains(r) for r in self.hrows)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Submodule):
            return NotImplemented
        return self.module is other.module and self.hrows == other.hrows

    def __repr__(self):
        return f"<submodule of order {self.order()}>"


@dataclass
class FiltrationReport:
    """Torsion, graded orders, and filtration stages through degree r_max."""

    module: FiniteLevelModule
    r_max: int
    torsions: list[Submodule]
    stages: list[Submodule]
    delta_orders: list[int]
    universal: Submodule

    def stage(self, r: int) -> Submodule:
        """M^(r) for 1 <= r <= r_max (stages above r_max are not computed)."""
        return self.stages[r - 1]

    def torsion(self, r: int) -> Submodule:
        return self.torsions[r - 1]

    def stage_quotient_log_order(self, r: int) -> int:
        """log_p of |M^(r) / M^(r+1)| (needs r < r_max)."""
        p = self.module.spec.p
        ratio = self.stage(r).order() // self.stage(r + 1).order()
        e = round(math.log(ratio, p))
        if p**e != ratio:
            raise IwaheightsError("stage quotient is not a p-power")
        return e


# -- elementary shapes and invariant extraction --------------------------


@dataclass(frozen=True)
class ElementaryShape:
    """Multiplicities of an elementary module: free part, J-power blocks,
    and a J-coprime part carried opaquely."""

    e_infinity: int
    j_blocks: tuple[tuple[int, int], ...] = ()
    coprime_part: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if self.e_infinity < 0 or any(e < 0 or i < 1 for i, e in self.j_blocks):
            raise ValueError("multiplicities must be nonnegative, block sizes >= 1")

    def multiplicity(self, i: int) -> int:
        return sum(e for j, e in self.j_blocks if j == i)

    def max_block(self) -> int:
        return max((i for i, e in self.j_blocks if e), default=0)


def shape_dims(shape: ElementaryShape, r_max: int) -> list[int]:
    """dim^(r) = e_r + e_(r+1) + ... + e_infinity for r = 1..r_max.

    The J-coprime part contributes nothing.
    """
    return [
        sum(e for i, e in shape.j_blocks if i >= r) + shape.e_infinity
        for r in range(1, r_max + 1)
    ]


@dataclass(frozen=True)
class InvariantProfile:
    e: tuple[int, ...]
    e_infinity: int

    def multiplicity(self, r: int) -> int:
        return self.e[r - 1] if r <= len(self.e) else 0


def infer_invariants(dims: Sequence[int]) -> InvariantProfile:
    """Recover (e_1, e_2, ..., e_infinity) from a stabilised dimension
    sequence: e_r = dims[r] - dims[r+1], e_infinity = the stable tail."""
    if not dims:
        raise ValueError("need at least one dimension")
    if any(a < b for a, b in zip(dims, dims[1:])):
        raise ValueError("dimension sequence must be non-increasing")
    if len(dims) >= 2 and dims[-1] != dims[-2]:
        raise ValueError("dimension sequence has not stabilised")
    e = tuple(a - b for a, b in zip(dims, dims[1:]))
    return InvariantProfile(e, dims[-1])


def zp_rank_estimate(orders: Sequence[int], p: int) -> tuple[int, bool]:
    """Rank from module orders at consecutive coefficient precisions.

    The rank is log_p of the last order ratio; `stabilized` records that the
    ratio matched the previous one (so at least three orders are needed for
    a positive stabilisation verdict).
    """
    if len(orders) < 2:
        raise ValueError("need orders at two consecutive precisions at least")
    ratios = []
    for a, b in zip(orders, orders[1:]):
        if b % a != 0:
            raise IwaheightsError(f"order ratio {b}/{a} is not integral")
        q = b // a
        r = 0
        while q % p == 0:
            q //= p
            r += 1
        if q != 1:
            raise IwaheightsError(f"order ratio {b}/{a} is not a power of {p}")
        ratios.append(r)
    stabilized = len(ratios) >= 2 and ratios[-1] == ratios[-2]
    return ratios[-1], stabilized


def module_from_shape(
    spec: RingSpec, level: int, shape: ElementaryShape, enum_cap: int = DEFAULT_ENUM_CAP
) -> FiniteLevelModule:
    """Present a shape at a finite level: one generator per block, with the
    relation T^i on a Lambda/J^i block and f on a coprime block.  Free
    blocks and blocks with i >= p^level degenerate identically at this
    level."""
    ngens = shape.e_infinity + sum(e for _, e in shape.j_blocks) + len(shape.coprime_part)
    relations = []
    idx = shape.e_infinity
    zero = GroupRingElem.zero(spec, level)
    for i, e in shape.j_blocks:
        for _ in range(e):
            if i < spec.p**level:
                row = [zero] * ngens
                row[idx] = GroupRingElem.from_poly_coeffs(spec, level, [0] * i + [1])
                relations.append(row)
            idx += 1
    for f in shape.coprime_part:
        row = [zero] * ngens
        row[idx] = GroupRingElem.from_poly_coeffs(spec, level, list(f))
        relations.append(row)
        idx += 1
    return FiniteLevelModule(spec, level, ngens, relations, enum_cap)
