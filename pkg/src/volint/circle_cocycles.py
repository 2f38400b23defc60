"""Exact cocycle calculus on SO(2)^m and O(2)^m.

SO(2) is identified with R/Z by the orientation-preserving map sending the
rotation by ``2*pi*a`` to ``a``.  Angles are exact rationals in [0, 1).

The degree ``2m-1`` cocycle kappa is the product

    (-1)**(m-1) / 2**(m-1) * Rot_1(g0, g1) * Or_2(g1, g2, g3) * ... * Or_m(g_{2m-3}, g_{2m-2}, g_{2m-1})

with Rot lifted to its representative in [0, 1) before scaling, so the
pairing against the fundamental cycle is computed as an exact rational
lift and reduced mod 1 afterwards.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Any, Mapping, Sequence

from . import kernels
from .errors import InputError, SchemaError
from .lattice_chains import LatticeCochain, evaluate, fundamental_cycle, pullback

DEFAULT_M_CAP = 4


def angle(value) -> Fraction:
    """Canonical representative in [0, 1) of a rational angle."""
    return Fraction(value) % 1


@dataclass(frozen=True)
class O2Element:
    """Element of O(2).

    ``reflect=False`` is the rotation R_a; ``reflect=True`` is the reflection
    R_a * s0 with s0 the reflection in the x-axis.
    """

    angle: Fraction
    reflect: bool = False

    def __post_init__(self):
        object.__setattr__(self, "angle", angle(self.angle))

    def __mul__(self, other: O2Element) -> O2Element:
        if not self.reflect:
            return O2Element(self.angle + other.angle, other.reflect)
        if not other.reflect:
            return O2Element(self.angle - other.angle, True)
        return O2Element(self.angle - other.angle, False)

    def inverse(self) -> O2Element:
        if self.reflect:
            return self
        return O2Element(-self.angle, False)

    @property
    def is_identity(self) -> bool:
        return not self.reflect and self.angle == 0

    def commutes_with(self, other: O2Element) -> bool:
        return self * other == other * self


@dataclass(frozen=True)
class TorusElement:
    """Element of SO(2)^m as a tuple of angles."""

    components: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(angle(a) for a in self.components))

    @classmethod
    def identity(cls, m: int) -> TorusElement:
        return cls((Fraction(0),) * m)

    @property
    def m(self) -> int:
        return len(self.components)

    def __mul__(self, other: TorusElement) -> TorusElement:
        return TorusElement(tuple(a + b for a, b in zip(self.components, other.components)))

    def __pow__(self, k: int) -> TorusElement:
        return TorusElement(tuple(k * a for a in self.components))

    def inverse(self) -> TorusElement:
        return TorusElement(tuple(-a for a in self.components))


@dataclass(frozen=True)
class TorusHom:
    """Homomorphism Z^(2m-1) -> O(2)^m given by the images of the basis vectors."""

    m: int
    generators: tuple[tuple[O2Element, ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise InputError("m must be >= 1")
        gens = tuple(tuple(e if isinstance(e, O2Element) else O2Element(e) for e in g)
                     for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) != 2 * self.m - 1:
            raise SchemaError(f"a hom at m={self.m} needs {2 * self.m - 1} generators, "
                              f"got {len(gens)}")
        if any(len(g) != self.m for g in gens):
            raise SchemaError(f"every generator needs {self.m} O(2) entries")

    @classmethod
    def from_angles(cls, rows: Sequence[Sequence[Any]]) -> TorusHom:
        m = len(rows[0]) if rows else 0
        return cls(m, tuple(tuple(O2Element(a) for a in row) for row in rows))

    @property
    def has_reflections(self) -> bool:
        return any(e.reflect for g in self.generators for e in g)

    def torus_generators(self) -> list[TorusElement]:
        if self.has_reflections:
            raise InputError("hom has reflection entries; apply o2_reduction first")
        return [TorusElement(tuple(e.angle for e in g)) for g in self.generators]

    def __call__(self, v: Sequence[int]) -> TorusElement:
        gens = self.torus_generators()
        acc = TorusElement.identity(self.m)
        for k, g in zip(v, gens):
            if k:
                acc = acc * g ** k
        return acc

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "generators": [
                [{"angle": f"{e.angle.numerator}/{e.angle.denominator}", "reflect": e.reflect}
                 for e in g]
                for g in self.generators
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> TorusHom:
        try:
            m = int(data["m"])
            gens = tuple(
                tuple(O2Element(Fraction(str(e["angle"])), bool(e.get("reflect", False)))
                      for e in g)
                for g in data["generators"]
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(f"malformed hom: {exc}") from exc
        return cls(m, gens)

    @classmethod
    def loads(cls, text: str) -> TorusHom:
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc


@dataclass(frozen=True)
class PairingValue:
    lift: Fraction
    reduced: Fraction = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "lift", Fraction(self.lift))
        object.__setattr__(self, "reduced", self.lift % 1)


def rot_cocycle(g, h) -> Fraction:
    """Rot(g, h) = g^-1 h, i.e. (h - g) mod 1."""
    return angle(Fraction(h) - Fraction(g))


def orientation_cocycle(g0, g1, g2) -> int:
    """+1 for positively cyclically ordered distinct angles, -1 for negative, else 0."""
    a, b, c = angle(g0), angle(g1), angle(g2)
    if a == b or b == c or a == c:
        return 0
    return 1 if (b - a) % 1 < (c - a) % 1 else -1


def euler2_cocycle(g0, g1, g2) -> Fraction:
    """Representative -Or/2 of the Euler class of SO(2)."""
    return Fraction(-orientation_cocycle(g0, g1, g2), 2)


def rot_cochain() -> LatticeCochain:
    """Rot as an R/Z-valued cochain on SO(2)."""
    return LatticeCochain(1, rot_cocycle, "circle", name="Rot")


def rot_lift_cochain(factor: int | None = None) -> LatticeCochain:
    """Rot lifted to its rational representative in [0, 1).

    With ``factor`` set, it is pulled back along the projection to that
    (0-based) factor of SO(2)^m.
    """
    if factor is None:
        return LatticeCochain(1, rot_cocycle, "rational", name="Rot~")
    return LatticeCochain(
        1, lambda g, h: rot_cocycle(g.components[factor], h.components[factor]),
        "rational", name=f"Rot~_{factor + 1}")


def orientation_cochain(factor: int | None = None) -> LatticeCochain:
    if factor is None:
        return LatticeCochain(2, lambda a, b, c: Fraction(orientation_cocycle(a, b, c)),
                              "rational", name="Or")
    return LatticeCochain(
        2, lambda a, b, c: Fraction(orientation_cocycle(
            a.components[factor], b.components[factor], c.components[factor])),
        "rational", name=f"Or_{factor + 1}")


def euler2_cochain() -> LatticeCochain:
    return LatticeCochain(2, euler2_cocycle, "rational", name="eps2")


def kappa_value(m: int, g: Sequence[TorusElement]) -> Fraction:
    """Value of the kappa representative on 2m torus elements."""
    if len(g) != 2 * m:
        raise InputError(f"kappa at m={m} takes {2 * m} arguments")
    value = rot_cocycle(g[0].components[0], g[1].components[0])
    if value == 0:
        return Fraction(0)
    for j in range(2, m + 1):
        c = j - 1
        o = orientation_cocycle(g[2 * j - 3].components[c], g[2 * j - 2].components[c],
                                g[2 * j - 1].components[c])
        if o == 0:
            return Fraction(0)
        value *= o
    return Fraction((-1) ** (m - 1), 2 ** (m - 1)) * value


def kappa_cocycle(m: int) -> LatticeCochain:
    if m < 1:
        raise InputError("m must be >= 1")
    return LatticeCochain(2 * m - 1, lambda *g: kappa_value(m, g), "rational",
                          name=f"kappa_{m}")


@dataclass(frozen=True)
class ReducedHom:
    hom: TorusHom


@dataclass(frozen=True)
class ZeroByReflection:
    factor: int
    reflection: O2Element


def o2_reduction(rho: TorusHom) -> ReducedHom | ZeroByReflection:
    """Split a hom into O(2)^m into the reflection and the purely rotational case.

    A factor whose image is {1, s} with s a reflection kills the pairing.
    Any other image containing a reflection is not covered and rejected.
    """
    gens = rho.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            for a, b in zip(gens[i], gens[j]):
                if not a.commutes_with(b):
                    raise InputError(f"generators {i} and {j} do not commute")
    for factor in range(rho.m):
        column = [g[factor] for g in gens]
        reflections = {e for e in column if e.reflect}
        if not reflections:
            continue
        others = [e for e in column if not e.reflect and not e.is_identity]
        if len(reflections) == 1 and not others:
            return ZeroByReflection(factor, next(iter(reflections)))
        raise InputError(
            f"factor {factor + 1} has image beyond {{1, s}}; not a case of the reduction")
    return ReducedHom(rho)


def _common_denominator(values: Sequence[Fraction]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in values), 1)


def higher_rotation_number(rho: TorusHom, *, method: str = "kernel",
                           m_cap: int = DEFAULT_M_CAP) -> PairingValue:
    """Pairing of the pulled-back kappa with the fundamental cycle of Z^(2m-1).

    ``method="kernel"`` uses the integer permutation-sum kernel;
    ``method="chain"`` pulls kappa back and evaluates it on the explicit
    fundamental cycle.  Both are exact.
    """
    m = rho.m
    if m > m_cap:
        raise InputError(f"m = {m} exceeds the cap {m_cap}")
    gens = rho.torus_generators()
    if method == "chain":
        z = fundamental_cycle(2 * m - 1)
        return PairingValue(evaluate(pullback(kappa_cocycle(m), rho), z))
    if method != "kernel":
        raise InputError(f"unknown method {method!r}")
    entries = [a for g in gens for a in g.components]
    L = _common_denominator(entries)
    table = [[int(a * L) for a in g.components] for g in gens]
    s = kernels.kappa_pairing_num(table, L, m)
    return PairingValue(Fraction((-1) ** (m - 1) * s, 2 ** (m - 1) * L))


def random_hom(rng: random.Random, m: int, max_den: int = 30) -> TorusHom:
    rows = [[Fraction(rng.randrange(d), d) for d in (rng.randint(1, max_den) for _ in range(m))]
            for _ in range(2 * m - 1)]
    return TorusHom.from_angles(rows)


@dataclass(frozen=True)
class AuditReport:
    defect: Fraction
    integral: bool
    modulus: Fraction
    boundary_terms: tuple[Fraction, ...]


def integrality_audit(normalized_vol, cusp_homs: Sequence[TorusHom | ZeroByReflection],
                      m: int, bieberbach_divisor: int | None = None) -> AuditReport:
    """Check that -normalized_vol + sum of cusp pairings vanishes mod 1 (or mod 1/B).

    Cusp data may be given as homs into O(2)^m; reflection cases
    contribute zero by :func:`o2_reduction`.
    """
    if m < 2:
        raise InputError("the audit needs even dimension 2m >= 4")
    if bieberbach_divisor is not None and bieberbach_divisor < 1:
        raise InputError("the Bieberbach divisor must be a positive integer")
    terms = []
    for hom in cusp_homs:
        if isinstance(hom, ZeroByReflection):
            terms.append(Fraction(0))
            continue
        if hom.m != m:
            raise InputError(f"cusp hom has m={hom.m}, audit is at m={m}")
        reduced = o2_reduction(hom)
        if isinstance(reduced, ZeroByReflection):
            terms.append(Fraction(0))
        else:
            terms.append(higher_rotation_number(reduced.hom).lift)
    modulus = Fraction(1, bieberbach_divisor or 1)
    defect = (-Fraction(normalized_vol) + sum(terms, Fraction(0))) % modulus
    return AuditReport(defect, defect == 0, modulus, tuple(terms))
