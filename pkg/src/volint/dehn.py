"""Gluing-equation solver for cusped hyperbolic 3-manifolds.

Equations are given in logarithmic form: a row (a, b, r) asserts
``sum_j a_j log z_j + b_j log(1 - z_j) = r * pi * i``.  The cusp log-holonomy
of a meridian or longitude row is the left side minus ``r * pi * i``, so the
complete structure has all cusp holonomies zero and a filled cusp with slope
(p, q) satisfies ``p * u + q * v = 2 * pi * i``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import IO, Any, Mapping, Sequence

import numpy as np

from .errors import InputError, NonConvergenceError, SchemaError, ShapeDegenerationError
from .hypvol import vol3_ideal_many

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100
MAX_HALVINGS = 30
DEGENERATE_SHAPE = 1e-10
FLAT_TOL = 1e-8


class FlatShapeWarning(UserWarning):
    """A converged solution has some shape with Im z <= 0."""


@dataclass(frozen=True)
class EquationRow:
    a: tuple[int, ...]
    b: tuple[int, ...]
    rhs_pi_i: int = 0

    def to_json(self) -> dict:
        return {"a": list(self.a), "b": list(self.b), "rhs_pi_i": self.rhs_pi_i}


@dataclass(frozen=True)
class CuspRows:
    meridian: EquationRow
    longitude: EquationRow


@dataclass(frozen=True)
class GluingSystem:
    shape_count: int
    edge_rows: tuple[EquationRow, ...]
    cusp_rows: tuple[CuspRows, ...]
    name: str = ""

    def __post_init__(self):
        if self.shape_count < 1:
            raise SchemaError("shape count must be positive")
        rows = list(self.edge_rows)
        for c in self.cusp_rows:
            rows += [c.meridian, c.longitude]
        for row in rows:
            if len(row.a) != self.shape_count or len(row.b) != self.shape_count:
                raise SchemaError(
                    f"equation row has length {len(row.a)}/{len(row.b)}, expected {self.shape_count}")

    @property
    def cusp_count(self) -> int:
        return len(self.cusp_rows)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "shapes": self.shape_count,
            "edges": [r.to_json() for r in self.edge_rows],
            "cusps": [{"meridian": c.meridian.to_json(), "longitude": c.longitude.to_json()}
                      for c in self.cusp_rows],
        }


def _int_list(value: Any, where: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise SchemaError(f"{where} must be a list of integers")
    return tuple(value)


def _row(data: Any, where: str) -> EquationRow:
    if not isinstance(data, Mapping):
        raise SchemaError(f"{where} must be an object")
    try:
        a, b = data["a"], data["b"]
    except KeyError as exc:
        raise SchemaError(f"{where} is missing {exc.args[0]!r}") from exc
    rhs = data.get("rhs_pi_i", 0)
    if not isinstance(rhs, int) or isinstance(rhs, bool):
        raise SchemaError(f"{where}.rhs_pi_i must be an integer")
    return EquationRow(_int_list(a, f"{where}.a"), _int_list(b, f"{where}.b"), rhs)


def gluing_system_from_json(data: Any) -> GluingSystem:
    if not isinstance(data, Mapping):
        raise SchemaError("gluing system must be a JSON object")
    n = data.get("shapes")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise SchemaError("'shapes' must be a positive integer")
    edges = data.get("edges")
    cusps = data.get("cusps", [])
    if not isinstance(edges, list) or not isinstance(cusps, list):
        raise SchemaError("'edges' and 'cusps' must be lists")
    edge_rows = tuple(_row(e, f"edges[{i}]") for i, e in enumerate(edges))
    cusp_rows = []
    for i, c in enumerate(cusps):
        if not isinstance(c, Mapping) or "meridian" not in c or "longitude" not in c:
            raise SchemaError(f"cusps[{i}] needs a meridian and a longitude row")
        cusp_rows.append(CuspRows(_row(c["meridian"], f"cusps[{i}].meridian"),
                                  _row(c["longitude"], f"cusps[{i}].longitude")))
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("'name' must be a string")
    return GluingSystem(n, edge_rows, tuple(cusp_rows), name)


def load_gluing_system(source: IO[bytes] | IO[str] | bytes | str) -> GluingSystem:
    """Parse a gluing system from a stream or raw JSON text."""
    raw = source if isinstance(source, (bytes, str)) else source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    if not raw.strip():
        raise SchemaError("empty gluing-system input")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    return gluing_system_from_json(data)


def bundled_system(name: str = "figure_eight") -> GluingSystem:
    try:
        text = resources.files("volint").joinpath("data", f"{name}.json").read_text()
    except FileNotFoundError as exc:
        raise InputError(f"no bundled gluing system named {name!r}") from exc
    return load_gluing_system(text)


def figure_eight() -> GluingSystem:
    return bundled_system("figure_eight")


Slope = tuple[int, int]


def check_slope(slope: Sequence[int]) -> Slope:
    try:
        p, q = (int(s) for s in slope)
    except (TypeError, ValueError) as exc:
        raise InputError("slope must be a pair of integers") from exc
    if math.gcd(p, q) != 1:
        raise InputError(f"slope ({p},{q}) is not a coprime pair")
    return p, q


def normalize_slopes(gs: GluingSystem, slopes) -> tuple[Slope | None, ...]:
    """Accept None (all unfilled), one slope for a one-cusped system, or one entry per cusp."""
    if slopes is None:
        return (None,) * gs.cusp_count
    if len(slopes) == 2 and all(isinstance(s, (int, np.integer)) for s in slopes):
        slopes = [slopes]
    if len(slopes) != gs.cusp_count:
        raise InputError(f"expected {gs.cusp_count} slope entries, got {len(slopes)}")
    return tuple(None if s is None else check_slope(s) for s in slopes)


@dataclass
class SolveResult:
    shapes: np.ndarray
    residual: float
    iterations: int
    geometric: bool
    warnings: list[str] = field(default_factory=list)

    @property
    def volume(self) -> float:
        return total_volume(self.shapes)

    def to_json(self, digits: int = 12) -> dict:
        fmt = lambda x: float(f"{x:.{digits}g}")
        return {
            "volume": fmt(self.volume),
            "shapes": [[fmt(z.real), fmt(z.imag)] for z in self.shapes],
            "residual": float(f"{self.residual:.3g}"),
            "iterations": self.iterations,
            "geometric": self.geometric,
            "warnings": list(self.warnings),
        }


class _Equations:
    """Rows of the system at given slopes and filling parameter s."""

    def __init__(self, gs: GluingSystem, slopes: tuple[Slope | None, ...], s: float = 1.0):
        a_rows, b_rows, rhs = [], [], []
        for row in gs.edge_rows:
            a_rows.append(row.a)
            b_rows.append(row.b)
            rhs.append(1j * math.pi * row.rhs_pi_i)
        for cusp, slope in zip(gs.cusp_rows, slopes):
            m, l = cusp.meridian, cusp.longitude
            if slope is None:
                a_rows.append(m.a)
                b_rows.append(m.b)
                rhs.append(1j * math.pi * m.rhs_pi_i)
            else:
                p, q = slope
                a_rows.append(tuple(p * x + q * y for x, y in zip(m.a, l.a)))
                b_rows.append(tuple(p * x + q * y for x, y in zip(m.b, l.b)))
                rhs.append(1j * math.pi * (p * m.rhs_pi_i + q * l.rhs_pi_i) + 2j * math.pi * s)
        self.A = np.array(a_rows, dtype=float)
        self.B = np.array(b_rows, dtype=float)
        self.rhs = np.array(rhs, dtype=complex)

    def residual(self, logz: np.ndarray, log1mz: np.ndarray) -> np.ndarray:
        return self.A @ logz + self.B @ log1mz - self.rhs

    def jacobian(self, z: np.ndarray) -> np.ndarray:
        return self.A / z[None, :] - self.B / (1.0 - z)[None, :]


def _check_degenerate(z: np.ndarray) -> None:
    bad = (np.abs(z) < DEGENERATE_SHAPE) | (np.abs(1.0 - z) < DEGENERATE_SHAPE) | (np.abs(z) > 1.0 / DEGENERATE_SHAPE)
    if np.any(bad) or not np.all(np.isfinite(z)):
        raise ShapeDegenerationError(f"shape parameters degenerate toward 0, 1 or infinity: {z.tolist()}")


def _track(prev_log: np.ndarray, prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    return prev_log + np.log(new / prev)


def _newton(eqs: _Equations, z0: np.ndarray, logs: tuple[np.ndarray, np.ndarray] | None,
            tol: float, max_iter: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, float, int]:
    z = np.array(z0, dtype=complex)
    _check_degenerate(z)
    if logs is None:
        logz, log1mz = np.log(z), np.log(1.0 - z)
    else:
        logz, log1mz = logs
    F = eqs.residual(logz, log1mz)
    res = float(np.max(np.abs(F)))
    it = 0
    while res >= tol:
        if it >= max_iter:
            raise NonConvergenceError(f"no convergence after {max_iter} iterations (residual {res:.3g})")
        it += 1
        step = np.linalg.lstsq(eqs.jacobian(z), -F, rcond=None)[0]
        t = 1.0
        for _ in range(MAX_HALVINGS + 1):
            zn = z + t * step
            # a step that nearly crosses 0 or 1 would confuse the branch tracking
            if np.all(np.abs(zn) > DEGENERATE_SHAPE) and np.all(np.abs(1.0 - zn) > DEGENERATE_SHAPE):
                ln = _track(logz, z, zn)
                l1n = _track(log1mz, 1.0 - z, 1.0 - zn)
                Fn = eqs.residual(ln, l1n)
                rn = float(np.max(np.abs(Fn)))
                if rn < res:
                    break
            t *= 0.5
        else:
            _check_degenerate(z + step)
            raise NonConvergenceError(
                f"damping failed after {MAX_HALVINGS} halvings at iteration {it} (residual {res:.3g})")
        z, logz, log1mz, F, res = zn, ln, l1n, Fn, rn
        _check_degenerate(z)
    return z, logz, log1mz, res, it


def _is_flat(zj: complex) -> bool:
    return zj.imag <= FLAT_TOL * max(1.0, abs(zj))


def _result(eqs: _Equations, z: np.ndarray, res: float, it: int, tol: float,
            require_geometric: bool) -> SolveResult:
    flat = [j for j, zj in enumerate(z) if _is_flat(zj)]
    if not flat:
        # geometric shapes must solve the equations on the principal branch
        principal = float(np.max(np.abs(eqs.residual(np.log(z), np.log(1.0 - z)))))
        if principal >= tol:
            raise ShapeDegenerationError(
                f"shapes {z.tolist()} solve only a wound branch of the equations "
                f"(principal residual {principal:.3g})")
        res = principal
    msgs = []
    if flat:
        msg = f"non-geometric solution: Im z <= 0 for shapes {flat}"
        if require_geometric:
            raise ShapeDegenerationError(msg)
        msgs.append(msg)
        warnings.warn(msg, FlatShapeWarning, stacklevel=3)
    return SolveResult(z, res, it, not flat, msgs)


def _initial(gs: GluingSystem, init) -> np.ndarray:
    if init is None:
        return np.full(gs.shape_count, 1j)
    z = np.array(init, dtype=complex).reshape(-1)
    if z.size != gs.shape_count:
        raise InputError(f"initial shape vector has {z.size} entries, expected {gs.shape_count}")
    if np.any(z.imag <= 0):
        raise InputError("initial shapes must have positive imaginary part")
    return z


def solve(gs: GluingSystem, slopes=None, init=None, tol: float = DEFAULT_TOL,
          max_iter: int = DEFAULT_MAX_ITER, require_geometric: bool = False) -> SolveResult:
    """Damped least-squares Newton solve of the edge and cusp equations.

    Edge equations are redundant, so each step is the least-squares solution
    of the full linearized system.  Steps are halved until the max residual
    decreases.  Logarithms follow the path of each shape rather than the
    principal branch.
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    if max_iter < 0:
        raise InputError("max_iter must be non-negative")
    eqs = _Equations(gs, normalize_slopes(gs, slopes))
    z, _, _, res, it = _newton(eqs, _initial(gs, init), None, tol, max_iter)
    if it == 0 and max_iter == 0:
        raise NonConvergenceError("max_iter = 0 performs no iterations")
    return _result(eqs, z, res, it, tol, require_geometric)


def total_volume(shapes) -> float:
    """Sum of the signed ideal tetrahedron volumes D(z_j)."""
    z = np.asarray(shapes, dtype=complex).reshape(-1)
    return float(math.fsum(vol3_ideal_many(z)))


def representation_volume(gs: GluingSystem, slopes=None, tol: float = DEFAULT_TOL,
                          max_iter: int = DEFAULT_MAX_ITER, init=None) -> float:
    """Volume of the solved structure; filled slopes are reached by continuation from the complete one."""
    norm = normalize_slopes(gs, slopes)
    if all(s is None for s in norm):
        return solve(gs, None, init, tol, max_iter).volume
    path = filling_path(gs, norm, steps=DEFAULT_PATH_STEPS, tol=tol, max_iter=max_iter, init=init)
    if not path.complete:
        raise ShapeDegenerationError(path.diagnostic)
    return path.final.volume


DEFAULT_PATH_STEPS = 20


@dataclass
class FillingPath:
    points: list[tuple[float, float]]
    results: list[SolveResult]
    complete: bool
    diagnostic: str = ""

    @property
    def final(self) -> SolveResult:
        return self.results[-1]

    def max_jump(self) -> float:
        v = [p[1] for p in self.points]
        return max((abs(b - a) for a, b in zip(v, v[1:])), default=0.0)

    def to_json(self, digits: int = 12) -> dict:
        fmt = lambda x: float(f"{x:.{digits}g}")
        return {
            "points": [[fmt(s), fmt(v)] for s, v in self.points],
            "complete": self.complete,
            "diagnostic": self.diagnostic,
        }


def filling_path(gs: GluingSystem, slopes, steps: int, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER, init=None) -> FillingPath:
    """Volumes along p*u + q*v = 2*pi*i*s for s from 0 (complete) to 1 (filled).

    Each step starts Newton from the previous shapes and branches.  The path
    stops at the first step that fails or leaves the geometric region.
    """
    if steps < 2:
        raise InputError("steps must be at least 2")
    norm = normalize_slopes(gs, slopes)
    z = _initial(gs, init)
    logs = None
    points: list[tuple[float, float]] = []
    results: list[SolveResult] = []
    for k in range(steps):
        s = k / (steps - 1)
        eqs = _Equations(gs, norm, s)
        try:
            z, logz, log1mz, res, it = _newton(eqs, z, logs, tol, max_iter)
        except (NonConvergenceError, ShapeDegenerationError) as exc:
            return FillingPath(points, results, False, f"stopped at s={s:.6g}: {exc}")
        logs = (logz, log1mz)
        if any(_is_flat(zj) for zj in z):
            return FillingPath(points, results, False,
                               f"stopped at s={s:.6g}: shapes left the geometric region {z.tolist()}")
        r = SolveResult(z.copy(), res, it, True)
        results.append(r)
        points.append((s, r.volume))
    return FillingPath(points, results, True)


def doubling_volume(base: float, k: int, ell: int) -> tuple[float, Fraction]:
    """Volume 2(k - ell) * base of the folded k-fold double and its ratio (k - ell)/k."""
    if isinstance(k, bool) or isinstance(ell, bool) or int(k) != k or int(ell) != ell:
        raise InputError("k and ell must be integers")
    k, ell = int(k), int(ell)
    if k < 1:
        raise InputError("k must be positive")
    if ell < 0 or ell >= k:
        raise InputError(f"need 0 <= ell < k, got ell={ell}, k={k}")
    return 2 * (k - ell) * base, Fraction(k - ell, k)
