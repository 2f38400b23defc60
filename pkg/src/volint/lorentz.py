"""Matrix algebra in SO(n,1).

Matrices act on R^(n+1) with the form q(x) = x_1^2 + ... + x_n^2 - x_(n+1)^2.
The parabolic subgroup P is the stabilizer of the light-like ray through
e_1 - e_(n+1); it factors as P = M A N with the generators :func:`m_matrix`,
:func:`a_matrix` and :func:`n_matrix`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import DegeneracyError, InputError, SchemaError

DEFAULT_TOL = 1e-9
# log of the spectral radius above which an element counts as hyperbolic
HYPERBOLIC_GAP = 1e-4


def form(n: int) -> np.ndarray:
    """J = diag(1, ..., 1, -1) of size n+1."""
    j = np.eye(n + 1)
    j[n, n] = -1.0
    return j


def minkowski(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x[:-1], y[:-1]) - x[-1] * y[-1])


def q(x: np.ndarray) -> float:
    return minkowski(x, x)


class LorentzMatrix:
    """An element of SO(n,1), checked against A^T J A = J and det A = 1."""

    __slots__ = ("entries", "n")

    def __init__(self, entries, tol: float = DEFAULT_TOL, *, check: bool = True):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise InputError(f"expected a square matrix of size >= 2, got shape {a.shape}")
        self.entries = a
        self.entries.setflags(write=False)
        self.n = a.shape[0] - 1
        if check:
            self.validate(tol)

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        j = form(self.n)
        a = self.entries
        scale = max(1.0, float(np.max(np.abs(a)))) ** 2
        err = float(np.max(np.abs(a.T @ j @ a - j)))
        if err > tol * scale:
            raise InputError(f"matrix does not preserve q (error {err:.3g})")
        det = float(np.linalg.det(a))
        if abs(det - 1.0) > tol * scale * (self.n + 1):
            raise InputError(f"determinant {det:.12g} is not 1")

    def form_error(self) -> float:
        j = form(self.n)
        return float(np.max(np.abs(self.entries.T @ j @ self.entries - j)))

    @property
    def time_sign(self) -> int:
        """+1 when the upper sheet of the hyperboloid is preserved."""
        return 1 if self.entries[self.n, self.n] > 0 else -1

    @property
    def epsilon(self) -> int:
        """Orientation character of the induced isometry of H^n."""
        det = 1 if np.linalg.det(self.entries) > 0 else -1
        return det * self.time_sign ** (self.n + 1)

    def isometry_matrix(self) -> np.ndarray:
        """The representative in O+(n,1) of the induced isometry."""
        return self.time_sign * self.entries

    def __matmul__(self, other):
        if isinstance(other, LorentzMatrix):
            return LorentzMatrix(self.entries @ other.entries, check=False)
        return self.entries @ np.asarray(other, dtype=float)

    def inverse(self) -> LorentzMatrix:
        j = form(self.n)
        return LorentzMatrix(j @ self.entries.T @ j, check=False)

    def conjugate_by(self, g: LorentzMatrix) -> LorentzMatrix:
        """g A g^-1."""
        return g @ self @ g.inverse()

    def allclose(self, other: LorentzMatrix, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.entries - other.entries)) < tol)

    def __repr__(self) -> str:
        return f"LorentzMatrix(n={self.n}, {self.entries.tolist()!r})"

    def to_json(self) -> dict:
        return {"n": self.n, "rows": self.entries.tolist()}

    @classmethod
    def from_json(cls, data: Mapping[str, Any], tol: float = DEFAULT_TOL) -> LorentzMatrix:
        try:
            rows = data["rows"]
            n = int(data.get("n", len(rows) - 1))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"malformed matrix: {exc}") from exc
        if len(rows) != n + 1 or any(len(r) != n + 1 for r in rows):
            raise SchemaError(f"matrix rows do not match n={n}")
        return cls(rows, tol)

    @classmethod
    def loads(cls, text: str, tol: float = DEFAULT_TOL) -> LorentzMatrix:
        try:
            return cls.from_json(json.loads(text), tol)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc}") from exc


def identity(n: int) -> LorentzMatrix:
    return LorentzMatrix(np.eye(n + 1), check=False)


def m_matrix(U, tol: float = DEFAULT_TOL) -> LorentzMatrix:
    """m(U) = diag(1, U, 1) for U in SO(n-1)."""
    u = np.array(U, dtype=float)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise InputError("U must be square")
    k = u.shape[0]
    if np.max(np.abs(u.T @ u - np.eye(k)), initial=0.0) > tol or abs(np.linalg.det(u) - 1) > tol:
        raise InputError("U must be special orthogonal")
    a = np.eye(k + 2)
    a[1:k + 1, 1:k + 1] = u
    return LorentzMatrix(a, check=False)


def a_matrix(t: float, n: int) -> LorentzMatrix:
    """Boost in the (e_1, e_(n+1)) plane."""
    a = np.eye(n + 1)
    c, s = np.cosh(t), np.sinh(t)
    a[0, 0] = a[n, n] = c
    a[0, n] = a[n, 0] = s
    return LorentzMatrix(a, check=False)


def n_matrix(x) -> LorentzMatrix:
    """Unipotent element fixing e_1 - e_(n+1), for x in R^(n-1)."""
    x = np.asarray(x, dtype=float).ravel()
    k = x.size
    n = k + 1
    h = 0.5 * float(x @ x)
    a = np.eye(n + 1)
    a[0, 0] = 1 - h
    a[0, 1:n] = -x
    a[0, n] = -h
    a[1:n, 0] = x
    a[1:n, n] = x
    a[n, 0] = h
    a[n, 1:n] = x
    a[n, n] = 1 + h
    return LorentzMatrix(a, check=False)


def torus_matrix(blocks: Sequence[np.ndarray]) -> LorentzMatrix:
    """Image of (A_1, ..., A_m) in O(2)^m: block diagonal with last entry prod det A_i."""
    m = len(blocks)
    a = np.eye(2 * m + 1)
    sign = 1.0
    for i, b in enumerate(blocks):
        b = np.asarray(b, dtype=float)
        a[2 * i:2 * i + 2, 2 * i:2 * i + 2] = b
        sign *= np.sign(np.linalg.det(b))
    a[2 * m, 2 * m] = sign
    return LorentzMatrix(a, check=False)


def rotation2(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_so(k: int, rng: np.random.Generator) -> np.ndarray:
    if k == 0:
        return np.zeros((0, 0))
    qm, r = np.linalg.qr(rng.normal(size=(k, k)))
    qm = qm * np.sign(np.diag(r))
    if np.linalg.det(qm) < 0:
        qm[:, 0] = -qm[:, 0]
    return qm


def random_lorentz(n: int, rng: np.random.Generator, scale: float = 1.0) -> LorentzMatrix:
    """Random element of SO(n,1)^0 as k1 a(t) k2 with k1, k2 in SO(n)."""
    k1 = np.eye(n + 1)
    k1[:n, :n] = random_so(n, rng)
    k2 = np.eye(n + 1)
    k2[:n, :n] = random_so(n, rng)
    t = rng.normal(scale=scale)
    return LorentzMatrix(k1 @ a_matrix(t, n).entries @ k2, check=False)


class Kind(str, Enum):
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class IsometryClass:
    kind: Kind
    fixed_point: np.ndarray | None = None
    """Interior fixed point on the upper hyperboloid sheet (elliptic)."""
    fixed_rays: tuple[np.ndarray, ...] = ()
    """Light-like rays normalized to last coordinate 1: the parabolic fixed
    point, or the (attracting, repelling) axis endpoints."""

    def to_json(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind.value}
        if self.fixed_point is not None:
            out["fixed_point"] = self.fixed_point.tolist()
        if self.fixed_rays:
            out["fixed_rays"] = [r.tolist() for r in self.fixed_rays]
        return out


def _normalize_ray(v: np.ndarray) -> np.ndarray:
    v = np.real_if_close(v)
    v = np.real(v).astype(float)
    return v / v[-1]


def _to_hyperboloid(v: np.ndarray) -> np.ndarray:
    v = np.real(v).astype(float)
    v = v / np.sqrt(-q(v))
    return v if v[-1] > 0 else -v


def _null_space(a: np.ndarray, tol: float) -> np.ndarray:
    _, s, vt = np.linalg.svd(a)
    rank = int(np.sum(s > tol))
    return vt[rank:].T


def _fixed_space_analysis(mats: Sequence[np.ndarray], tol: float):
    """Common fixed vectors of the matrices, split by the sign of q."""
    n1 = mats[0].shape[0]
    stacked = np.vstack([m - np.eye(n1) for m in mats])
    basis = _null_space(stacked, np.sqrt(tol))
    if basis.shape[1] == 0:
        return None, None
    j = form(n1 - 1)
    gram = basis.T @ j @ basis
    w, v = np.linalg.eigh(gram)
    timelike = None
    light = None
    if w[0] < -np.sqrt(tol):
        timelike = _to_hyperboloid(basis @ v[:, 0])
    else:
        # light-like fixed vectors lie in the radical of the restricted form
        radical = v[:, np.abs(w) <= np.sqrt(tol)]
        for k in range(radical.shape[1]):
            cand = basis @ radical[:, k]
            if abs(cand[-1]) > np.sqrt(tol):
                light = _normalize_ray(cand)
                break
        if light is None and radical.shape[1] > 1:
            comb = basis @ radical.sum(axis=1)
            if abs(comb[-1]) > np.sqrt(tol):
                light = _normalize_ray(comb)
    return timelike, light


def classify(A: LorentzMatrix, tol: float = DEFAULT_TOL) -> IsometryClass:
    """Elliptic, parabolic or hyperbolic, with the fixed data on the closed ball."""
    a = A.isometry_matrix()
    eig, vecs = np.linalg.eig(a)
    radius = float(np.max(np.abs(eig)))
    log_radius = np.log(radius)
    # a parabolic Jordan block of size 3 spreads its eigenvalues by the cube root of the rounding error
    noise = max(A.form_error(), np.finfo(float).eps * float(np.max(np.abs(a))) ** 2)
    gap = max(HYPERBOLIC_GAP, 10.0 * np.cbrt(noise))
    if log_radius > gap:
        i_out = int(np.argmax(np.abs(eig)))
        i_in = int(np.argmin(np.abs(eig)))
        rays = []
        for i in (i_out, i_in):
            if abs(eig[i].imag) > np.sqrt(tol) * radius:
                raise DegeneracyError("dominant eigenvalue is not real")
            v = np.real(vecs[:, i])
            if abs(v[-1]) < np.sqrt(tol):
                raise DegeneracyError("dominant eigenvector is not light-like")
            ray = _normalize_ray(v)
            if abs(q(ray)) > 1e3 * np.sqrt(tol):
                raise DegeneracyError("dominant eigenvector is not light-like")
            rays.append(ray)
        return IsometryClass(Kind.HYPERBOLIC, fixed_rays=tuple(rays))
    timelike, light = _fixed_space_analysis([a], tol)
    if timelike is not None:
        return IsometryClass(Kind.ELLIPTIC, fixed_point=timelike)
    if light is not None:
        return IsometryClass(Kind.PARABOLIC, fixed_rays=(light,))
    raise DegeneracyError(
        f"no fixed point found at tolerance {tol:g} (log spectral radius {log_radius:.3g})")


def _rotation_to_minus_e1(u: np.ndarray) -> np.ndarray:
    """R in SO(n) with R u = -e_1, for a unit vector u."""
    n = u.size
    target = np.zeros(n)
    target[0] = -1.0
    if n == 1:
        if u[0] < 0:
            return np.eye(1)
        raise DegeneracyError("SO(1) cannot move e_1 to -e_1")
    w = u - target
    if np.linalg.norm(w) < 1e-14:
        return np.eye(n)
    w = w / np.linalg.norm(w)
    h = np.eye(n) - 2.0 * np.outer(w, w)  # reflection, det -1, fixes -e_1 image
    flip = np.eye(n)
    flip[1, 1] = -1.0
    return flip @ h


def conjugator_to_P(ray: np.ndarray) -> LorentzMatrix:
    """c in SO(n,1)^0 with c . ray proportional to e_1 - e_(n+1)."""
    ray = _normalize_ray(ray)
    n = ray.size - 1
    u = ray[:n] / np.linalg.norm(ray[:n])
    c = np.eye(n + 1)
    c[:n, :n] = _rotation_to_minus_e1(u)
    return LorentzMatrix(c, check=False)


def boost_to(p: np.ndarray) -> LorentzMatrix:
    """The boost L in SO(n,1)^0 with L e_(n+1) = p."""
    p = _to_hyperboloid(p)
    n = p.size - 1
    ps, pt = p[:n], p[n]
    b = np.eye(n + 1)
    b[:n, :n] += np.outer(ps, ps) / (1.0 + pt)
    b[:n, n] = ps
    b[n, :n] = ps
    b[n, n] = pt
    return LorentzMatrix(b, check=False)


class Case(str, Enum):
    INTO_P = "IntoP"
    INTO_T0 = "IntoT0"


@dataclass(frozen=True)
class ConjugacyCase:
    case: Case
    conjugator: LorentzMatrix
    residual: float
    route: str = ""

    def to_json(self) -> dict:
        return {"case": self.case.value, "conjugator": self.conjugator.to_json(),
                "residual": self.residual, "route": self.route}


def in_P(A: LorentzMatrix, tol: float = DEFAULT_TOL) -> float:
    """Distance of A from P, measured on the image of the ray e_1 - e_(n+1)."""
    n = A.n
    v = np.zeros(n + 1)
    v[0], v[n] = 1.0, -1.0
    w = A.entries @ v
    lam = w[0]
    if lam <= 0:
        return float("inf")
    return float(np.max(np.abs(w - lam * v)) / lam)


def t0_residual(A: LorentzMatrix) -> float:
    """Max entry outside the 2x2 diagonal block pattern of T_0."""
    a = A.entries
    n1 = a.shape[0]
    mask = np.ones_like(a, dtype=bool)
    for i in range(0, n1 - 1, 2):
        mask[i:i + 2, i:i + 2] = False
    mask[n1 - 1, n1 - 1] = False
    off = float(np.max(np.abs(a[mask]), initial=0.0))
    return max(off, abs(a[n1 - 1, n1 - 1] - 1.0))


def _block_diagonalize(rots: Sequence[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """Orthogonal Q with Q^T R Q block diagonal (2x2 blocks) for commuting R in SO(n)."""
    k = rots[0].shape[0]
    coeffs = rng.uniform(0.5, 1.5, size=len(rots))
    comb = sum(c * r for c, r in zip(coeffs, rots))
    t, qm = scipy.linalg.schur(comb, output="real")
    # 1x1 blocks of the real Schur form are fixed lines; pair them up
    order = []
    singles = []
    i = 0
    while i < k:
        if i + 1 < k and abs(t[i + 1, i]) > 1e-12:
            order.extend([i, i + 1])
            i += 2
        else:
            singles.append(i)
            i += 1
    order.extend(singles)
    qm = qm[:, order]
    if np.linalg.det(qm) < 0:
        qm[:, -1] = -qm[:, -1]
    return qm


def common_invariant_structure(B: Sequence[LorentzMatrix], tol: float = DEFAULT_TOL,
                               seed: int = 0) -> ConjugacyCase:
    """Conjugate a commuting family into P or into T_0.

    A common boundary fixed point gives the P case.  Otherwise a common
    interior fixed point is moved to e_(n+1) and the resulting rotations are
    simultaneously block-diagonalized.  When some element swaps the endpoints
    of an invariant axis, the fixed point of that element on the axis is used.
    """
    if not B:
        raise InputError("empty family")
    n = B[0].n
    if any(b.n != n for b in B):
        raise InputError("matrices of different sizes")
    scale = max(1.0, max(float(np.max(np.abs(b.entries))) for b in B))
    for i in range(len(B)):
        for j in range(i + 1, len(B)):
            comm = B[i].entries @ B[j].entries - B[j].entries @ B[i].entries
            if np.max(np.abs(comm)) > np.sqrt(tol) * scale ** 2:
                raise InputError(f"elements {i} and {j} do not commute")
    mats = [b.isometry_matrix() for b in B]
    classes = [classify(b, tol) for b in B]

    def _into_p(ray, route):
        c = conjugator_to_P(ray)
        res = max(in_P(b.conjugate_by(c)) for b in B)
        return ConjugacyCase(Case.INTO_P, c, res, route)

    for cl in classes:
        if cl.kind is Kind.PARABOLIC:
            return _into_p(cl.fixed_rays[0], "parabolic fixed point")
    point = None
    route = ""
    for cl in classes:
        if cl.kind is Kind.HYPERBOLIC:
            g_plus, g_minus = cl.fixed_rays
            fixes_plus = all(_fixes_ray(m, g_plus, tol) for m in mats)
            if fixes_plus:
                return _into_p(g_plus, "axis endpoint")
            if all(_fixes_ray(m, g_minus, tol) for m in mats):
                return _into_p(g_minus, "axis endpoint")
            swapper = next((m for m in mats if _maps_ray(m, g_plus, g_minus, tol)), None)
            if swapper is None:
                raise DegeneracyError("family neither fixes nor swaps the axis endpoints")
            point = axis_swap_fixed_point(swapper, g_plus, g_minus)
            route = "axis swap"
            break
    if point is None:
        timelike, light = _fixed_space_analysis(mats, tol)
        if timelike is None:
            if light is not None:
                return _into_p(light, "common boundary fixed point")
            raise DegeneracyError("no common fixed point at tolerance")
        point = timelike
        route = "common interior fixed point"
    c1 = boost_to(point).inverse()
    rots = [(c1 @ LorentzMatrix(m, check=False) @ c1.inverse()).entries[:n, :n] for m in mats]
    qm = _block_diagonalize(rots, np.random.default_rng(seed))
    k = np.eye(n + 1)
    k[:n, :n] = qm.T
    c = LorentzMatrix(k, check=False) @ c1
    res = max(t0_residual(b.conjugate_by(c)) for b in B)
    return ConjugacyCase(Case.INTO_T0, c, res, route)


def axis_swap_fixed_point(b: np.ndarray, g_plus: np.ndarray, g_minus: np.ndarray) -> np.ndarray:
    """Fixed point on the geodesic (g_minus, g_plus) of an isometry b exchanging its ends.

    b reverses the geodesic, so it acts on it as a point reflection: for x on
    the geodesic, the midpoint of x and b x is fixed.
    """
    x = _to_hyperboloid(np.asarray(g_plus, float) + np.asarray(g_minus, float))
    y = np.asarray(b, float) @ x
    y = y if y[-1] > 0 else -y
    return _to_hyperboloid(x + y)


def _fixes_ray(m: np.ndarray, ray: np.ndarray, tol: float) -> bool:
    w = m @ ray
    if w[-1] <= 0:
        return False
    return bool(np.max(np.abs(w / w[-1] - ray)) < np.sqrt(tol))


def _maps_ray(m: np.ndarray, src: np.ndarray, dst: np.ndarray, tol: float) -> bool:
    w = m @ src
    if w[-1] <= 0:
        return False
    return bool(np.max(np.abs(w / w[-1] - dst)) < np.sqrt(tol))


def decompose_P(p: LorentzMatrix, tol: float = DEFAULT_TOL) -> tuple[np.ndarray, float, np.ndarray]:
    """(U, t, x) with p = m(U) a(t) n(x)."""
    n = p.n
    if in_P(p) > np.sqrt(tol) or p.time_sign < 0:
        raise InputError("matrix is not in P")
    v = np.zeros(n + 1)
    v[0], v[n] = 1.0, -1.0
    lam = float((p.entries @ v)[0])
    t = -np.log(lam)
    rest = a_matrix(-t, n).entries @ p.entries  # = m(U) n(x)
    x = rest[n, 1:n].copy()
    U = rest[1:n, 1:n].copy()
    recon = m_matrix(U, tol=max(tol, 1e-6)).entries @ a_matrix(t, n).entries @ n_matrix(x).entries
    err = float(np.max(np.abs(recon - p.entries)))
    scale = max(1.0, float(np.max(np.abs(p.entries))))
    if err > 10 * tol * scale:
        raise DegeneracyError(f"decomposition residual {err:.3g} too large")
    return U, float(t), x
