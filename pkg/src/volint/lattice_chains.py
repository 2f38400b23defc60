"""Exact bar-complex machinery for the lattice Z^n.

Chains are finite formal sums of homogeneous simplices ``[v0, ..., vk]``
with exact rational coefficients.  Chains are taken modulo the diagonal
translation action, so every simplex is stored in normal form with its
first vertex at the origin; boundary faces are re-normalized.  With this
convention the boundary of the fundamental cycle is literally zero.

Cochains are homogeneous (translation-invariant) functions of ``k+1``
group elements.  The evaluator may return an exact rational, a float, or a
rational modulo 1 (``kind`` = ``"rational"``, ``"real"``, ``"circle"``).
The same :class:`LatticeCochain` class serves cochains on the torus groups
of :mod:`volint.circle_cocycles`; :func:`pullback` transports them to Z^n.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import DegreeError, SchemaError, SizeLimitError, ValueSemanticsError

LatticePoint = tuple[int, ...]
Simplex = tuple[LatticePoint, ...]

DEFAULT_CAP = 8
KINDS = ("rational", "real", "circle")


def origin(n: int) -> LatticePoint:
    return (0,) * n


def basis_vector(n: int, i: int) -> LatticePoint:
    return tuple(1 if j == i else 0 for j in range(n))


def add(v: Sequence[int], w: Sequence[int]) -> LatticePoint:
    return tuple(a + b for a, b in zip(v, w))


def sub(v: Sequence[int], w: Sequence[int]) -> LatticePoint:
    return tuple(a - b for a, b in zip(v, w))


def normalize_simplex(vertices: Iterable[Sequence[int]]) -> Simplex:
    """Translate a simplex so that its first vertex is the origin."""
    verts = [tuple(int(c) for c in v) for v in vertices]
    if not verts:
        raise DegreeError("a simplex needs at least one vertex")
    dim = len(verts[0])
    if dim < 1 or any(len(v) != dim for v in verts):
        raise SchemaError("all vertices must be points of the same Z^n, n >= 1")
    base = verts[0]
    return tuple(sub(v, base) for v in verts)


def permutation_sign(p: Sequence[int]) -> int:
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


class LatticeChain:
    """Exact chain: a finite map from normalized simplices to nonzero rationals."""

    __slots__ = ("_terms", "dim", "degree")

    def __init__(self, terms: Mapping[Iterable[Sequence[int]], Any] | None = None, *,
                 dim: int, degree: int):
        if dim < 1:
            raise SchemaError("dimension must be >= 1")
        if degree < 0:
            raise DegreeError("degree must be >= 0")
        self.dim = dim
        self.degree = degree
        acc: dict[Simplex, Fraction] = {}
        for verts, coeff in (terms or {}).items():
            s = normalize_simplex(verts)
            self._check(s)
            c = Fraction(coeff)
            acc[s] = acc.get(s, Fraction(0)) + c
        self._terms = {s: c for s, c in acc.items() if c != 0}

    def _check(self, s: Simplex) -> None:
        if len(s) != self.degree + 1:
            raise DegreeError(f"simplex of degree {len(s) - 1} in a degree-{self.degree} chain")
        if len(s[0]) != self.dim:
            raise SchemaError(f"vertex of dimension {len(s[0])} in a Z^{self.dim} chain")

    @classmethod
    def _from_normalized(cls, terms: dict[Simplex, Fraction], dim: int, degree: int) -> LatticeChain:
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.degree = degree
        obj._terms = {s: c for s, c in terms.items() if c != 0}
        return obj

    @classmethod
    def zero(cls, dim: int, degree: int) -> LatticeChain:
        return cls._from_normalized({}, dim, degree)

    @property
    def terms(self) -> dict[Simplex, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeChain):
            return NotImplemented
        return (self.dim, self.degree, self._terms) == (other.dim, other.degree, other._terms)

    def __hash__(self) -> int:
        return hash((self.dim, self.degree, frozenset(self._terms.items())))

    def _compatible(self, other: LatticeChain) -> None:
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise DegreeError("chains of different dimension or degree")

    def __add__(self, other: LatticeChain) -> LatticeChain:
        self._compatible(other)
        out = dict(self._terms)
        for s, c in other._terms.items():
            out[s] = out.get(s, Fraction(0)) + c
        return LatticeChain._from_normalized(out, self.dim, self.degree)

    def __neg__(self) -> LatticeChain:
        return LatticeChain._from_normalized({s: -c for s, c in self._terms.items()},
                                             self.dim, self.degree)

    def __sub__(self, other: LatticeChain) -> LatticeChain:
        return self + (-other)

    def __rmul__(self, scalar) -> LatticeChain:
        k = Fraction(scalar)
        return LatticeChain._from_normalized({s: k * c for s, c in self._terms.items()},
                                             self.dim, self.degree)

    def __repr__(self) -> str:
        if not self._terms:
            return f"LatticeChain(0, dim={self.dim}, degree={self.degree})"
        parts = [f"{c}*{list(map(list, s))}" for s, c in sorted(self._terms.items())]
        return "LatticeChain(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        terms = [
            {"coeff": f"{c.numerator}/{c.denominator}", "vertices": [list(v) for v in s]}
            for s, c in sorted(self._terms.items())
        ]
        return {"dim": self.dim, "degree": self.degree, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> LatticeChain:
        try:
            dim = int(data["dim"])
            degree = int(data["degree"])
            raw = data["terms"]
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed chain: {exc}") from exc
        chain = cls.zero(dim, degree)
        for term in raw:
            try:
                coeff = Fraction(term["coeff"])
                verts = term["vertices"]
            except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
                raise SchemaError(f"malformed chain term: {exc}") from exc
            chain = chain + cls({tuple(map(tuple, verts)): coeff}, dim=dim, degree=degree)
        return chain

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def simplex_chain(vertices: Sequence[Sequence[int]], coeff=1) -> LatticeChain:
    verts = [tuple(v) for v in vertices]
    return LatticeChain({tuple(verts): coeff}, dim=len(verts[0]), degree=len(verts) - 1)


def fundamental_cycle(n: int, cap: int = DEFAULT_CAP) -> LatticeChain:
    """Signed sum over Sym(n) of the staircase simplices [0, e_s1, e_s1+e_s2, ...]."""
    if n < 1:
        raise SizeLimitError("n must be a positive integer")
    if n > cap:
        raise SizeLimitError(f"n = {n} exceeds the cap {cap} ({math.factorial(n)} terms)")
    terms: dict[Simplex, Fraction] = {}
    for p in permutations(range(n)):
        current = [0] * n
        verts = [tuple(current)]
        for idx in p:
            current[idx] += 1
            verts.append(tuple(current))
        terms[tuple(verts)] = Fraction(permutation_sign(p))
    return LatticeChain._from_normalized(terms, n, n)


def boundary(c: LatticeChain) -> LatticeChain:
    if c.degree < 1:
        raise DegreeError("boundary is defined for degree >= 1")
    out: dict[Simplex, Fraction] = {}
    for s, coeff in c.items():
        for i in range(len(s)):
            face = normalize_simplex(s[:i] + s[i + 1:])
            val = coeff if i % 2 == 0 else -coeff
            out[face] = out.get(face, Fraction(0)) + val
    return LatticeChain._from_normalized(out, c.dim, c.degree - 1)


@dataclass(frozen=True)
class LatticeCochain:
    """A homogeneous cochain given by an evaluator on ``degree+1`` group elements."""

    degree: int
    evaluator: Callable[..., Any]
    kind: str = "rational"
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueSemanticsError(f"unknown value kind {self.kind!r}")
        if self.degree < 0:
            raise DegreeError("degree must be >= 0")

    def __call__(self, *points):
        if len(points) != self.degree + 1:
            raise DegreeError(
                f"{self.name or 'cochain'} of degree {self.degree} takes "
                f"{self.degree + 1} arguments, got {len(points)}")
        value = self.evaluator(*points)
        if self.kind == "circle":
            return Fraction(value) % 1
        return value


def constant_cochain(value, kind: str = "rational") -> LatticeCochain:
    v = Fraction(value) if kind != "real" else float(value)
    return LatticeCochain(0, lambda _g: v, kind, name=f"const({v})")


def zero_cochain(degree: int, kind: str = "rational") -> LatticeCochain:
    z = 0.0 if kind == "real" else Fraction(0)
    return LatticeCochain(degree, lambda *_g: z, kind, name="0")


def exact_det(rows: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            f = a[r][col] / p
            if f:
                row_r, row_c = a[r], a[col]
                for k in range(col, n):
                    row_r[k] -= f * row_c[k]
    return det


def euclidean_volume_cocycle(n: int) -> LatticeCochain:
    """V(v0,...,vn) = det(v1-v0, ..., vn-v0) / n!, exact."""
    if n < 1:
        raise DegreeError("n must be >= 1")
    fact = math.factorial(n)

    def volume(*vs):
        v0 = vs[0]
        rows = [[Fraction(a) - Fraction(b) for a, b in zip(v, v0)] for v in vs[1:]]
        if any(len(r) != n for r in rows):
            raise ValueSemanticsError(f"V_{n} takes points of Z^{n}")
        return exact_det(rows) / fact

    return LatticeCochain(n, volume, "rational", name=f"V_{n}")


def _combine_kinds(ka: str, kb: str) -> str:
    if ka == kb == "rational":
        return "rational"
    if "circle" in (ka, kb):
        if "real" in (ka, kb):
            raise ValueSemanticsError("cannot multiply real and R/Z values")
        return "circle"
    return "real"


def _product(x, y, kind: str, circle_side: int | None):
    if kind == "circle":
        other = y if circle_side == 0 else x
        if Fraction(other).denominator != 1:
            raise ValueSemanticsError(
                "R/Z-valued cochains can only be multiplied by integer values")
        return Fraction(x) * Fraction(y)
    return x * y


def cup(alpha: LatticeCochain, beta: LatticeCochain) -> LatticeCochain:
    """Front-face/back-face product."""
    if alpha.kind == beta.kind == "circle":
        raise ValueSemanticsError("cannot multiply two R/Z-valued cochains")
    kind = _combine_kinds(alpha.kind, beta.kind)
    circle_side = 0 if alpha.kind == "circle" else 1 if beta.kind == "circle" else None
    p, q = alpha.degree, beta.degree

    def ev(*g):
        a = alpha(*g[: p + 1])
        if a == 0:
            return a if kind != "circle" else Fraction(0)
        b = beta(*g[p:])
        return _product(a, b, kind, circle_side)

    return LatticeCochain(p + q, ev, kind, name=f"({alpha.name} cup {beta.name})")


def coboundary(alpha: LatticeCochain) -> LatticeCochain:
    k = alpha.degree

    def ev(*g):
        total = Fraction(0) if alpha.kind != "real" else 0.0
        for i in range(k + 2):
            v = alpha(*(g[:i] + g[i + 1:]))
            total = total + v if i % 2 == 0 else total - v
        return total

    return LatticeCochain(k + 1, ev, alpha.kind, name=f"d({alpha.name})")


def evaluate(alpha: LatticeCochain, c: LatticeChain):
    """Pairing sum(coeff * alpha(vertices)); reduced mod 1 for R/Z-valued alpha."""
    if alpha.degree != c.degree:
        raise DegreeError(f"cochain of degree {alpha.degree} against chain of degree {c.degree}")
    if alpha.kind == "real":
        return math.fsum(float(coeff) * alpha(*s) for s, coeff in c.items())
    total = Fraction(0)
    for s, coeff in c.items():
        if alpha.kind == "circle" and coeff.denominator != 1:
            raise ValueSemanticsError("R/Z-valued cochains pair only with integral chains")
        total += coeff * alpha(*s)
    return total % 1 if alpha.kind == "circle" else total


def pullback(alpha: LatticeCochain, hom: Callable[[LatticePoint], Any]) -> LatticeCochain:
    """Cochain on Z^n obtained by precomposing with a homomorphism out of Z^n."""
    return LatticeCochain(alpha.degree, lambda *vs: alpha(*(hom(v) for v in vs)),
                          alpha.kind, name=f"pullback({alpha.name})")


def random_chain(rng: random.Random, dim: int, degree: int, n_terms: int = 5,
                 spread: int = 3) -> LatticeChain:
    terms = {}
    for _ in range(n_terms):
        verts = tuple(tuple(rng.randint(-spread, spread) for _ in range(dim))
                      for _ in range(degree + 1))
        terms[verts] = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
    return LatticeChain(terms, dim=dim, degree=degree)


def spot_check_invariance(alpha: LatticeCochain, dim: int, rng: random.Random,
                          trials: int = 50, spread: int = 4) -> bool:
    """Compare alpha on random tuples with its value on translated tuples."""
    for _ in range(trials):
        pts = [tuple(rng.randint(-spread, spread) for _ in range(dim))
               for _ in range(alpha.degree + 1)]
        w = tuple(rng.randint(-spread, spread) for _ in range(dim))
        if alpha(*pts) != alpha(*(add(p, w) for p in pts)):
            return False
    return True
