"""Transfer of Z-invariant cochains to R through an interval fundamental domain.

Domains are finite unions of half-open intervals (a, b] with rational
endpoints.  Everything except the transfer integral itself is exact.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Mapping, Sequence

from .errors import CoverageError, InputError, SchemaError
from .lattice_chains import LatticeCochain

Interval = tuple[Fraction, Fraction]

GRID_DENOMINATOR = 64
DEFAULT_FLAG_THRESHOLD = 1e-6


def _frac(x) -> Fraction:
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError as exc:
            raise SchemaError(f"not a rational: {x!r}") from exc
    if isinstance(x, float) and not math.isfinite(x):
        raise InputError("endpoints must be finite")
    return Fraction(x)


def _render(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _hits(x: Fraction, a: Fraction, b: Fraction) -> int:
    """Number of integers k with k + a < x <= k + b."""
    return math.ceil(x - a) - math.ceil(x - b)


@dataclass(frozen=True)
class IntervalDomain:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(sorted((_frac(a), _frac(b)) for a, b in self.intervals))
        object.__setattr__(self, "intervals", ivs)
        if not ivs:
            raise InputError("domain needs at least one interval")
        for a, b in ivs:
            if not a < b:
                raise InputError(f"interval ({a}, {b}] is empty")
        for (_, b0), (a1, _) in zip(ivs, ivs[1:]):
            if a1 < b0:
                raise InputError(f"intervals overlap near {a1}")
        if self.length != 1:
            raise InputError(f"domain has total length {self.length}, expected 1")
        for j in range(-2 * GRID_DENOMINATOR, 2 * GRID_DENOMINATOR + 1):
            x = Fraction(j, GRID_DENOMINATOR)
            if self.cover_count(x) != 1:
                raise CoverageError(f"translates cover {x} {self.cover_count(x)} times")

    @property
    def length(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __contains__(self, s) -> bool:
        s = _frac(s)
        return any(a < s <= b for a, b in self.intervals)

    def cover_count(self, x) -> int:
        x = _frac(x)
        return sum(_hits(x, a, b) for a, b in self.intervals)

    def breakpoints_mod1(self) -> set[Fraction]:
        return {e % 1 for iv in self.intervals for e in iv}

    def to_json(self) -> dict:
        return {"intervals": [[_render(a), _render(b)] for a, b in self.intervals]}

    @classmethod
    def from_json(cls, data: Any) -> IntervalDomain:
        if not isinstance(data, Mapping) or not isinstance(data.get("intervals"), list):
            raise SchemaError("domain must be an object with an 'intervals' list")
        ivs = []
        for i, iv in enumerate(data["intervals"]):
            if not isinstance(iv, list) or len(iv) != 2:
                raise SchemaError(f"intervals[{i}] must be a pair")
            if not all(isinstance(e, (str, int)) and not isinstance(e, bool) for e in iv):
                raise SchemaError(f"intervals[{i}] endpoints must be rational strings or integers")
            ivs.append((_frac(iv[0]), _frac(iv[1])))
        return cls(tuple(ivs))

    @classmethod
    def loads(cls, text: str | bytes) -> IntervalDomain:
        try:
            return cls.from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}") from exc


def standard_domain() -> IntervalDomain:
    return IntervalDomain(((Fraction(0), Fraction(1)),))


def bad_domain(n_max: int) -> IntervalDomain:
    """Pieces n + (1/2^n, 1/2^(n-1)] for n = 1..n_max plus the remainder (0, 1/2^n_max]."""
    if n_max < 1:
        raise InputError("n_max must be >= 1")
    pieces = [(n + Fraction(1, 2 ** n), n + Fraction(1, 2 ** (n - 1))) for n in range(1, n_max + 1)]
    pieces.append((Fraction(0), Fraction(1, 2 ** n_max)))
    return IntervalDomain(tuple(pieces))


def retract(x, D: IntervalDomain) -> tuple[int, Fraction]:
    """The unique (k, s) with x = k + s and s in D."""
    x = _frac(x)
    found = []
    for a, b in D.intervals:
        lo, hi = math.ceil(x - b), math.ceil(x - a)
        found.extend(range(lo, hi))
    if len(found) != 1:
        raise CoverageError(f"{x} has {len(found)} preimages in the translates of the domain")
    k = found[0]
    return k, x - k


def translate_overlap_count(D: IntervalDomain, K: Sequence, N: int) -> int:
    """Count k in [-N, N] whose translate k + D meets the closed interval K."""
    lo, hi = (_frac(e) for e in K)
    if lo > hi:
        raise InputError("K must satisfy lo <= hi")
    if N < 1:
        raise InputError("N must be positive")
    return sum(1 for k in range(-N, N + 1)
               if any(k + a < hi and k + b >= lo for a, b in D.intervals))


@dataclass(frozen=True)
class TransferResult:
    value: float
    quadrature_error: float
    flagged: bool = False


def _integer_form(alpha) -> Callable[..., Any]:
    if isinstance(alpha, LatticeCochain):
        return lambda *ks: alpha(*((k,) for k in ks))
    return alpha


def transfer_cochain(alpha, D: IntervalDomain, samples: int,
                     flag_threshold: float = DEFAULT_FLAG_THRESHOLD) -> Callable[..., TransferResult]:
    """Evaluator for g -> integral over [0, 1) of alpha(r(g + g_0), ..., r(g + g_n)).

    The integrand is piecewise constant.  The value is the midpoint rule on
    the uniform grid refined at every breakpoint, which is exact up to
    rounding.  The error estimate bounds the plain uniform midpoint rule:
    each uniform cell split by a breakpoint contributes its width times the
    oscillation of the integrand on it.
    """
    if samples < 2:
        raise InputError("samples must be >= 2")
    f = _integer_form(alpha)
    ends = D.breakpoints_mod1()

    def integrand(g: Fraction, gs: Sequence[Fraction]) -> float:
        return float(f(*(retract(g + gi, D)[0] for gi in gs)))

    def evaluate(*g) -> TransferResult:
        if not g:
            raise InputError("transfer evaluator needs at least one argument")
        gs = [_frac(x) for x in g]
        inner: dict[int, list[Fraction]] = {}
        for c in {(e - gi) % 1 for gi in gs for e in ends}:
            j = math.floor(c * samples)
            if c * samples != j:
                inner.setdefault(j, []).append(c)
        terms, err_terms = [], []
        for j in range(samples):
            a, b = Fraction(j, samples), Fraction(j + 1, samples)
            cuts = [a, *sorted(inner.get(j, ())), b]
            vals = [integrand((u + v) / 2, gs) for u, v in zip(cuts, cuts[1:])]
            terms.extend(float(v - u) * y for u, v, y in zip(cuts, cuts[1:], vals))
            if len(vals) > 1:
                err_terms.append((max(vals) - min(vals)) / samples)
        err = math.fsum(err_terms)
        return TransferResult(math.fsum(terms), err, err > flag_threshold)

    return evaluate


def uniform_midpoint(alpha, D: IntervalDomain, g: Sequence, samples: int) -> float:
    """Plain midpoint rule without breakpoint refinement, as a convergence oracle."""
    f = _integer_form(alpha)
    gs = [_frac(x) for x in g]
    total = math.fsum(
        float(f(*(retract(Fraction(2 * j + 1, 2 * samples) + gi, D)[0] for gi in gs)))
        for j in range(samples))
    return total / samples


class IntervalUnion:
    """Finite union of half-open intervals (a, b], kept merged and sorted."""

    def __init__(self, intervals: Iterable[Sequence] = ()):
        ivs = sorted((_frac(a), _frac(b)) for a, b in intervals)
        merged: list[list[Fraction]] = []
        for a, b in ivs:
            if not a < b:
                continue
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        self.intervals: tuple[Interval, ...] = tuple((a, b) for a, b in merged)

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.intervals), Fraction(0))

    def __and__(self, other: IntervalUnion) -> IntervalUnion:
        out = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo < hi:
                    out.append((lo, hi))
        return IntervalUnion(out)

    def __or__(self, other: IntervalUnion) -> IntervalUnion:
        return IntervalUnion(self.intervals + other.intervals)

    def __sub__(self, other: IntervalUnion) -> IntervalUnion:
        pieces = list(self.intervals)
        for c, d in other.intervals:
            nxt = []
            for a, b in pieces:
                if d <= a or b <= c:
                    nxt.append((a, b))
                    continue
                if a < c:
                    nxt.append((a, c))
                if d < b:
                    nxt.append((d, b))
            pieces = nxt
        return IntervalUnion(pieces)

    def __xor__(self, other: IntervalUnion) -> IntervalUnion:
        return (self - other) | (other - self)

    def __eq__(self, other) -> bool:
        return isinstance(other, IntervalUnion) and self.intervals == other.intervals

    def __repr__(self) -> str:
        return f"IntervalUnion({[(str(a), str(b)) for a, b in self.intervals]})"


def random_union(rng: random.Random, pieces: int = 4, den: int = 24, span: int = 3) -> IntervalUnion:
    out = []
    for _ in range(pieces):
        a = Fraction(rng.randint(-span * den, span * den), den)
        out.append((a, a + Fraction(rng.randint(1, den), den)))
    return IntervalUnion(out)


def measure_inequality_gap(B: IntervalUnion, E: IntervalUnion, E2: IntervalUnion) -> Fraction:
    """mu(E sym-diff E') - |mu(B & E) - mu(B & E')|, which is never negative."""
    return (E ^ E2).measure() - abs((B & E).measure() - (B & E2).measure())
