"""Signed hyperbolic simplex volumes in dimensions 2 and 3.

Points live in the hyperboloid model: interior points satisfy q(x) = -1
with positive last coordinate, ideal points are light-like rays scaled to
last coordinate 1.  Dimension 3 is supported for ideal simplices only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from . import kernels
from .errors import InputError, SchemaError
from .lorentz import LorentzMatrix, minkowski, q

POINT_TOL = 1e-12
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class HPoint:
    coords: np.ndarray
    ideal: bool

    @property
    def dim(self) -> int:
        return self.coords.size - 1

    @classmethod
    def interior(cls, coords: Sequence[float], tol: float = POINT_TOL) -> HPoint:
        x = np.array(coords, dtype=float)
        scale = max(1.0, float(x[-1]) ** 2)
        if x[-1] <= 0 or abs(q(x) + 1.0) > tol * scale:
            raise InputError("interior point must satisfy q(x) = -1 with last coordinate > 0")
        x.setflags(write=False)
        return cls(x, False)

    @classmethod
    def ideal_point(cls, coords: Sequence[float], tol: float = POINT_TOL) -> HPoint:
        x = np.array(coords, dtype=float)
        if x[-1] == 0:
            raise InputError("ideal ray must have nonzero last coordinate")
        x = x / x[-1]
        if abs(q(x)) > max(tol, 1e-9):
            raise InputError("ideal point must be light-like")
        x.setflags(write=False)
        return cls(x, True)

    @classmethod
    def from_plane(cls, u: float, v: float) -> HPoint:
        """Interior point of H^2 with spatial coordinates (u, v)."""
        return cls.interior([u, v, math.sqrt(1.0 + u * u + v * v)])

    @classmethod
    def at_angle(cls, theta: float, dim: int = 2) -> HPoint:
        """Ideal point of H^2 at boundary angle theta."""
        if dim != 2:
            raise InputError("at_angle builds boundary points of H^2")
        return cls.ideal_point([math.cos(theta), math.sin(theta), 1.0])

    def transform(self, A: LorentzMatrix) -> HPoint:
        """Image under the isometry induced by A."""
        w = A.entries @ self.coords
        if self.ideal:
            return HPoint.ideal_point(w, tol=1e-8)
        w = w if w[-1] > 0 else -w
        w = w / math.sqrt(-q(w))
        w.setflags(write=False)
        return HPoint(w, False)

    def to_json(self) -> dict:
        return {"kind": "ideal" if self.ideal else "interior", "coords": self.coords.tolist()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> HPoint:
        try:
            kind = data.get("kind", "interior")
            coords = [float(c) for c in data["coords"]]
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SchemaError(f"malformed point: {exc}") from exc
        if kind == "ideal":
            return cls.ideal_point(coords)
        if kind == "interior":
            return cls.interior(coords, tol=1e-9)
        raise SchemaError(f"unknown point kind {kind!r}")


def lobachevsky(theta: float) -> float:
    """Lambda(theta) = -int_0^theta log|2 sin u| du, by its Clausen power series."""
    return kernels.lobachevsky(theta)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def lobachevsky_quadrature(theta) -> np.ndarray | float:
    """Lambda by Gauss-Legendre quadrature, independent of the series.

    On [0, pi/2] the singular part log(2u) is integrated in closed form and
    log(sin u / u) numerically.
    """
    arr = np.asarray(theta, dtype=float)
    t = np.mod(arr, np.pi)
    sign = np.where(t > np.pi / 2, -1.0, 1.0)
    t = np.where(t > np.pi / 2, np.pi - t, t)
    half = 0.5 * t[..., None]
    u = half * (_GL_NODES + 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        smooth = np.where(u > 0, np.log(np.sin(u) / np.where(u > 0, u, 1.0)), 0.0)
    integral = np.sum(_GL_WEIGHTS * smooth, axis=-1) * half[..., 0]
    with np.errstate(invalid="ignore", divide="ignore"):
        singular = np.where(t > 0, t * np.log(2.0 * np.where(t > 0, t, 1.0)) - t, 0.0)
    out = -sign * (singular + integral)
    return float(out) if out.ndim == 0 else out


def lobachevsky_fourier(theta: float, terms: int = 100000) -> tuple[float, float]:
    """Truncated Fourier series 1/2 sum sin(2k theta)/k^2 and its tail bound 1/(2 terms)."""
    k = np.arange(1, terms + 1, dtype=float)
    value = 0.5 * float(np.sum(np.sin(2.0 * k * theta) / (k * k)))
    return value, 0.5 / terms


def _signed_det(points: Sequence[HPoint]) -> float:
    m = np.array([p.coords for p in points])
    return float(np.linalg.det(m))


def _vertex_angle(x: HPoint, y: HPoint, z: HPoint) -> float:
    if x.ideal:
        return 0.0
    xv = x.coords
    ty = y.coords + minkowski(xv, y.coords) * xv
    tz = z.coords + minkowski(xv, z.coords) * xv
    nyy, nzz = minkowski(ty, ty), minkowski(tz, tz)
    if nyy <= 0 or nzz <= 0:
        return 0.0
    c = minkowski(ty, tz) / math.sqrt(nyy * nzz)
    return math.acos(max(-1.0, min(1.0, c)))


def _coincide(a: HPoint, b: HPoint) -> bool:
    return bool(np.max(np.abs(a.coords - b.coords)) <= DEGENERATE_TOL * max(1.0, float(a.coords[-1])))


def area2(x0: HPoint, x1: HPoint, x2: HPoint) -> float:
    """Signed area of the geodesic triangle: orientation sign times (pi - angle sum).

    Positive orientation means det(x0, x1, x2) > 0; degenerate triangles give 0.
    """
    pts = (x0, x1, x2)
    if any(p.dim != 2 for p in pts):
        raise InputError("area2 takes points of H^2")
    if _coincide(x0, x1) or _coincide(x1, x2) or _coincide(x0, x2):
        return 0.0
    det = _signed_det(pts)
    norms = math.prod(float(np.linalg.norm(p.coords)) for p in pts)
    if abs(det) <= DEGENERATE_TOL * norms:
        return 0.0
    angles = _vertex_angle(x0, x1, x2) + _vertex_angle(x1, x2, x0) + _vertex_angle(x2, x0, x1)
    return math.copysign(max(0.0, math.pi - angles), det)


def vol3_ideal(z: complex) -> float:
    """Signed volume of the ideal tetrahedron of shape z, as the Bloch-Wigner D(z)."""
    z = complex(z)
    if z == 0 or z == 1:
        raise InputError("shape parameter must avoid 0 and 1")
    return kernels.bloch_wigner(z.real, z.imag)


def vol3_ideal_lambda(z: complex) -> float:
    """Same volume as the sum of Lambda over the three dihedral angles."""
    z = complex(z)
    if z == 0 or z == 1:
        raise InputError("shape parameter must avoid 0 and 1")
    if z.imag == 0:
        return 0.0
    if z.imag < 0:
        return -vol3_ideal_lambda(z.conjugate())
    alpha = math.atan2(z.imag, z.real)
    beta = math.atan2(z.imag, 1.0 - z.real)
    gamma = math.pi - alpha - beta
    return lobachevsky(alpha) + lobachevsky(beta) + lobachevsky(gamma)


def vol3_ideal_many(zs) -> np.ndarray:
    return kernels.bloch_wigner_many(zs)


def _boundary_projective(p: HPoint) -> tuple[complex, complex]:
    """Boundary point of H^3 as a projective pair (num, den) under stereographic projection."""
    x1, x2, x3 = (float(c) for c in p.coords[:3])
    a = (complex(x1, x2), complex(1.0 - x3, 0.0))
    b = (complex(1.0 + x3, 0.0), complex(x1, -x2))
    na = abs(a[0]) + abs(a[1])
    nb = abs(b[0]) + abs(b[1])
    return a if na >= nb else b


def _bracket(u: tuple[complex, complex], v: tuple[complex, complex]) -> complex:
    return u[0] * v[1] - v[0] * u[1]


def cross_ratio(a, b, c, d) -> complex | None:
    """[a:b:c:d] = (c-a)(d-b) / ((c-b)(d-a)) on projective pairs; None if degenerate."""
    num = _bracket(c, a) * _bracket(d, b)
    den = _bracket(c, b) * _bracket(d, a)
    scale = math.prod(abs(x[0]) + abs(x[1]) for x in (a, b, c, d))
    if abs(den) <= DEGENERATE_TOL * scale or abs(num) <= DEGENERATE_TOL * scale:
        return None
    return num / den


def vol3_ideal_points(p0: HPoint, p1: HPoint, p2: HPoint, p3: HPoint) -> float:
    pts = (p0, p1, p2, p3)
    if any(p.dim != 3 or not p.ideal for p in pts):
        raise InputError("dimension-3 volumes are supported for ideal points only")
    cr = cross_ratio(*(_boundary_projective(p) for p in pts))
    if cr is None:
        return 0.0
    z = cr
    if abs(z - 1) <= DEGENERATE_TOL:
        return 0.0
    return kernels.bloch_wigner(z.real, z.imag)


def ideal_point_from_complex(z: complex | None) -> HPoint:
    """Ideal point of H^3 over z in C (None for infinity), inverse stereographic projection."""
    if z is None:
        return HPoint.ideal_point([0.0, 0.0, 1.0, 1.0])
    r2 = abs(z) ** 2
    return HPoint.ideal_point([2 * z.real / (1 + r2), 2 * z.imag / (1 + r2),
                               (r2 - 1) / (r2 + 1), 1.0])


def cocycle_defect(points: Sequence[HPoint], dim: int) -> float:
    """Alternating sum of the face volumes of n+2 points."""
    if dim == 2:
        face_volume = area2
    elif dim == 3:
        face_volume = vol3_ideal_points
    else:
        raise InputError(f"unsupported dimension {dim}")
    if len(points) != dim + 2:
        raise InputError(f"need {dim + 2} points in dimension {dim}")
    total = 0.0
    for i in range(dim + 2):
        face = tuple(points[:i]) + tuple(points[i + 1:])
        v = face_volume(*face)
        total += v if i % 2 == 0 else -v
    return total


def sphere_volume(k: int) -> float:
    """Volume of the unit sphere S^k for even k = 2m: 2^(2m+1) pi^m m! / (2m)!."""
    if k < 2 or k % 2:
        raise InputError("sphere_volume takes an even dimension 2m >= 2")
    m = k // 2
    return 2 ** (2 * m + 1) * math.pi ** m * math.factorial(m) / math.factorial(2 * m)


def normalize_volume(v: float, m: int) -> float:
    """2 v / vol(S^(2m))."""
    if m < 1:
        raise InputError("m must be >= 1")
    return 2.0 * v / sphere_volume(2 * m)


def max_simplex_volume(n: int) -> float:
    if n == 2:
        return math.pi
    if n == 3:
        return 3.0 * lobachevsky(math.pi / 3)
    raise InputError("maximal simplex volume is available for n = 2, 3")
