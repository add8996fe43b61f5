"""The module of poles P = K/Lambda, with denominators gamma^(p^n) - 1.

A pole class lambda/(gamma^(p^n)-1) mod Lambda is determined by the class
of lambda at level n, so elements are stored as (level, numerator class),
normalised so the level is minimal and the zero class sits at level 0.

eta re-expresses a class relative to the generator gamma0^u and returns the
numerator's finite-level class; phi extracts the identity-group-element
coefficient afterwards.  Both satisfy the scaling laws eta_{gamma^u} =
u*eta_gamma and phi_{gamma^u} = u*phi_gamma, which the tests check through
the full re-expression pipeline.
"""

from __future__ import annotations

from dataclasses import dataclass

from iwaheights import linalg
from iwaheights.errors import PrecisionError
from iwaheights.iwalg import (
    GroupRingElem,
    IwasawaPoly,
    RingSpec,
    generator_ratio,
    project_to_level,
    required_projection_precision,
)


@dataclass(frozen=True)
class JGradedValue:
    """c * (gamma-1)^r modulo J^(r+1), in canonical form."""

    spec: RingSpec
    degree: int
    coeff: int

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be >= 0")
        object.__setattr__(self, "coeff", self.coeff % self.spec.modulus)

    def __add__(self, other: "JGradedValue") -> "JGradedValue":
        if self.degree != other.degree:
            raise ValueError("cannot add graded values of different degrees")
        return JGradedValue(self.spec, self.degree, self.coeff + other.coeff)

    def __neg__(self) -> "JGradedValue":
        return JGradedValue(self.spec, self.degree, -self.coeff)

    def scale(self, c: int) -> "JGradedValue":
        return JGradedValue(self.spec, self.degree, c * self.coeff)

    def shift_degree(self, s: int) -> "JGradedValue":
        """Multiply by (gamma-1)^s; the coefficient is unchanged."""
        return JGradedValue(self.spec, self.degree + s, self.coeff)

    def is_zero(self) -> bool:
        return self.coeff == 0


def norm_class(spec: RingSpec, n: int, level: int) -> GroupRingElem:
    """Class of the norm element (gamma^(p^n)-1)/(gamma-1) at a finite level."""
    size = spec.p**level
    if n <= level:
        cs = [0] * size
        for j in range(spec.p**n):
            cs[j] = 1
        return GroupRingElem(spec, level, cs)
    scalar = spec.p ** (n - level) % spec.modulus
    return GroupRingElem(spec, level, [scalar] * size)


def _nu_class(spec: RingSpec, n: int, m_level: int) -> GroupRingElem:
    """Class at level n of ((1+T)^(p^n)-1)/((1+T)^(p^m)-1)."""
    size = spec.p**n
    step = spec.p**m_level
    cs = [0] * size
    for j in range(spec.p ** (n - m_level)):
        cs[(j * step) % size] = (cs[(j * step) % size] + 1) % spec.modulus
    return GroupRingElem(spec, n, cs)


class PoleElem:
    """Class of numerator/(gamma^(p^level)-1) in P, at minimal level."""

    __slots__ = ("spec", "level", "numerator")

    def __init__(self, spec: RingSpec, level: int, numerator: GroupRingElem, _normalise=True):
        if numerator.spec != spec or numerator.level != level:
            raise ValueError("numerator must live at the stated level")
        if _normalise:
            level, numerator = _minimal_form(spec, level, numerator)
        self.spec = spec
        self.level = level
        self.numerator = numerator

    @classmethod
    def zero(cls, spec: RingSpec) -> "PoleElem":
        return cls(spec, 0, GroupRingElem.zero(spec, 0), _normalise=False)

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def raise_level(self, n: int) -> tuple[int, GroupRingElem]:
        """Numerator re-expressed with denominator at level n >= self.level."""
        if n < self.level:
            raise ValueError("can only raise the level")
        if n == self.level:
            return n, self.numerator
        lift = GroupRingElem(self.spec, n, self.numerator.coeffs)
        return n, lift * _nu_class(self.spec, n, self.level)

    def __add__(self, other: "PoleElem") -> "PoleElem":
        if self.spec != other.spec:
            raise ValueError("mixed specs")
        n = max(self.level, other.level)
        _, a = self.raise_level(n)
        _, b = other.raise_level(n)
        return PoleElem(self.spec, n, a + b)

    def __sub__(self, other: "PoleElem") -> "PoleElem":
        return self + (-other)

    def __neg__(self) -> "PoleElem":
        return PoleElem(self.spec, self.level, -self.numerator, _normalise=False)

    def scale(self, c: int) -> "PoleElem":
        return PoleElem(self.spec, self.level, self.numerator.scale(c))

    def act_group(self, x: GroupRingElem) -> "PoleElem":
        """Action of a finite-level group-ring element (level >= self.level)."""
        if x.level < self.level:
            x = GroupRingElem(self.spec, self.level, x.coeffs)
        else:
            x = x.fold_to_level(self.level)
        return PoleElem(self.spec, self.level, self.numerator * x)

    def act_iwasawa(self, lam: IwasawaPoly) -> "PoleElem":
        return self.act_group(project_to_level(lam, self.level))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PoleElem):
            return NotImplemented
        return (
            self.spec == other.spec
            and self.level == other.level
            and self.numerator == other.numerator
        )

    def __hash__(self):
        return hash((self.spec, self.level, self.numerator))

    def __repr__(self):
        return f"<pole {self.numerator!r} / omega_{self.level}>"


def _minimal_form(spec: RingSpec, level: int, num: GroupRingElem) -> tuple[int, GroupRingElem]:
    if num.is_zero():
        return 0, GroupRingElem.zero(spec, 0)
    for m_level in range(level):
        nu = _nu_class(spec, level, m_level)
        size = spec.p**level
        rows = [list((nu * GroupRingElem.gamma(spec, level, j)).coeffs) for j in range(size)]
        sol = linalg.solve_combination(rows, list(num.coeffs), spec.p, spec.k)
        if sol is not None:
            x = GroupRingElem(spec, level, sol)
            return m_level, x.fold_to_level(m_level)
    return level, num


def pole_reduce(lam: IwasawaPoly, n: int) -> PoleElem:
    """The class of lam/(gamma^(p^n)-1) in P, canonically normalised."""
    return PoleElem(lam.spec, n, project_to_level(lam, n))


def pole_involution(x: PoleElem) -> PoleElem:
    """The involution on P: numerator goes to minus its involution.

    Under eta this is minus the natural involution of the finite-level
    group ring, so phi(pole_involution(x)) = -phi(x).
    """
    return PoleElem(x.spec, x.level, -x.numerator.involution())


def eta(u: int, x: PoleElem) -> GroupRingElem:
    """Polar isomorphism at the generator gamma0^u, on a level-n class.

    Re-expresses x with denominator (gamma0^u)^(p^n) - 1 via the exact
    generator ratio, then reads off the numerator's finite-level class.
    """
    spec = x.spec
    n = x.level
    if u == 1:
        return x.numerator
    deg = (u - 1) * spec.p**n
    if spec.cap < max(deg, required_projection_precision(spec, n)):
        raise PrecisionError(
            f"cap {spec.cap} too small to re-express at generator exponent {u}"
        )
    ratio = project_to_level(generator_ratio(spec, n, u), n)
    return ratio * x.numerator


def phi(u: int, x: PoleElem) -> int:
    """Evaluation functional: identity-group-element coefficient after eta."""
    return eta(u, x).identity_coefficient
