"""Moebius maps, boundary circles and lines, and hyperbolic volume helpers.

Conventions used throughout the package:

  * maps act on the Riemann sphere C u {INF} and extend to the upper half
    space model {(z, t) : z in C, t > 0} by Poincare extension,
  * matrices are normalized to determinant 1; a map and its negative are the
    same isometry, so comparisons are projective,
  * a "support" is a circle or a line in C, the boundary trace of a geodesic
    plane; walls of domains are supports together with a choice of side.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as _zeta

INF = complex(math.inf, 0.0)

_DET_TOL = 1e-12


def is_inf(z: complex) -> bool:
    return cmath.isinf(z)


def unit(z: complex) -> complex:
    return z / abs(z)


class MoebiusMap:
    """An orientation preserving isometry of H^3 as a det-1 matrix."""

    __slots__ = ("m",)

    def __init__(self, m):
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("expected a 2x2 matrix")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) < _DET_TOL:
            raise ValueError("matrix is singular")
        self.m = m / cmath.sqrt(det)

    @property
    def a(self) -> complex:
        return self.m[0, 0]

    @property
    def b(self) -> complex:
        return self.m[0, 1]

    @property
    def c(self) -> complex:
        return self.m[1, 0]

    @property
    def d(self) -> complex:
        return self.m[1, 1]

    def __repr__(self):
        return f"MoebiusMap([[{self.a:.6g}, {self.b:.6g}], [{self.c:.6g}, {self.d:.6g}]])"

    def __call__(self, z: complex) -> complex:
        if is_inf(z):
            if abs(self.c) == 0.0:
                return INF
            return self.a / self.c
        den = self.c * z + self.d
        # catastrophic cancellation means z is the pole up to rounding
        if abs(den) <= 1e-13 * (abs(self.c * z) + abs(self.d)):
            return INF
        return (self.a * z + self.b) / den

    def __matmul__(self, other: "MoebiusMap") -> "MoebiusMap":
        return MoebiusMap(self.m @ other.m)

    def inverse(self) -> "MoebiusMap":
        a, b, c, d = self.a, self.b, self.c, self.d
        return MoebiusMap([[d, -b], [-c, a]])

    def trace(self) -> complex:
        return self.a + self.d

    def equals(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        """Projective comparison: equal up to overall sign."""
        diff = min(np.max(np.abs(self.m - other.m)), np.max(np.abs(self.m + other.m)))
        return diff < tol

    def is_identity(self, tol: float = 1e-9) -> bool:
        return self.equals(_IDENTITY, tol)

    def classify(self, tol: float = 1e-9):
        """Return (kind, angle).

        kind is one of "identity", "parabolic", "elliptic", "loxodromic".
        angle is the rotation angle in (0, pi] for elliptic maps, None
        otherwise; tr^2 = 4 cos^2(angle / 2).
        """
        t2 = self.trace() ** 2
        if abs(t2 - 4.0) < tol:
            if self.is_identity(tol):
                return "identity", None
            return "parabolic", None
        if abs(t2.imag) < tol and -tol < t2.real < 4.0:
            ratio = min(1.0, max(0.0, t2.real / 4.0))
            return "elliptic", 2.0 * math.acos(math.sqrt(ratio))
        return "loxodromic", None

    def isometric_circle(self) -> "Circle":
        """Boundary circle on which the map does not distort; needs c != 0."""
        if abs(self.c) < _DET_TOL:
            raise ValueError("map fixes infinity, no isometric circle")
        return Circle(-self.d / self.c, 1.0 / abs(self.c))

    def fixed_points(self):
        a, b, c, d = self.a, self.b, self.c, self.d
        if abs(c) < _DET_TOL:
            if abs(d - a) < _DET_TOL:
                return (INF,)
            return (b / (d - a), INF)
        disc = cmath.sqrt((a - d) ** 2 + 4.0 * b * c)
        if abs(disc) < 1e-12:
            return ((a - d) / (2.0 * c),)
        return ((a - d + disc) / (2.0 * c), (a - d - disc) / (2.0 * c))

    def apply_h3(self, z: complex, t: float):
        """Poincare extension to the upper half space; returns (z', t')."""
        den = self.c * z + self.d
        scale = abs(den) ** 2 + abs(self.c) ** 2 * t * t
        znew = ((self.a * z + self.b) * den.conjugate()
                + self.a * self.c.conjugate() * t * t) / scale
        return znew, t / scale


_IDENTITY_M = np.eye(2, dtype=complex)


def identity() -> MoebiusMap:
    return MoebiusMap(_IDENTITY_M)


_IDENTITY = identity()


def translation(b: complex) -> MoebiusMap:
    return MoebiusMap([[1.0, b], [0.0, 1.0]])


def _to_zero_one_inf(z1: complex, z2: complex, z3: complex) -> MoebiusMap:
    # Standard cross-ratio map sending (z1, z2, z3) to (0, 1, INF).
    if is_inf(z1):
        return MoebiusMap([[0.0, z2 - z3], [1.0, -z3]])
    if is_inf(z2):
        return MoebiusMap([[1.0, -z1], [1.0, -z3]])
    if is_inf(z3):
        return MoebiusMap([[1.0, -z1], [0.0, z2 - z1]])
    return MoebiusMap([[z2 - z3, -z1 * (z2 - z3)], [z2 - z1, -z3 * (z2 - z1)]])


def from_three_points(src, dst) -> MoebiusMap:
    """The unique map taking the triple src to the triple dst, in order."""
    return _to_zero_one_inf(*dst).inverse() @ _to_zero_one_inf(*src)


def fold_map(center: complex, radius: float, axis_im: float) -> MoebiusMap:
    """Reflection in the line Im z = axis_im composed with inversion in the
    circle of the given center and radius.

    The two anti-holomorphic factors compose to the Moebius map
    z -> conj(center) + 2i*axis_im + radius^2 / (z - center).
    """
    w = center
    top = w.conjugate() + 2j * axis_im
    m = np.array([[top, radius * radius - top * w], [1.0, -w]], dtype=complex)
    return MoebiusMap(m / (1j * radius))


def horoball_image(g: MoebiusMap, point: complex, size: float):
    """Image (point', size') of a horoball under g.

    A horoball is (INF, h) for the region {t > h}, or (p, d) for the ball
    tangent to C at the finite point p with Euclidean diameter d.
    """
    if not is_inf(point):
        send_off = MoebiusMap([[0.0, 1.0], [1.0, -point]])
        return horoball_image(g @ send_off.inverse(), INF, 1.0 / size)
    if abs(g.c) < _DET_TOL:
        return INF, size / abs(g.d) ** 2
    return g.a / g.c, 1.0 / (abs(g.c) ** 2 * size)


# ---------------------------------------------------------------------------
# supports: circles and lines on the boundary


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float


@dataclass(frozen=True)
class Line:
    point: complex
    direction: complex  # unit modulus

    def __post_init__(self):
        object.__setattr__(self, "direction", unit(self.direction))


def support_points(s):
    """Three sample points, used to transport a support through a map."""
    if isinstance(s, Circle):
        return (s.center + s.radius, s.center + 1j * s.radius, s.center - s.radius)
    return (s.point, s.point + s.direction, s.point - s.direction)


def support_contains(s, z: complex, tol: float = 1e-9) -> bool:
    if is_inf(z):
        return isinstance(s, Line)
    if isinstance(s, Circle):
        return abs(abs(z - s.center) - s.radius) <= tol * (1.0 + s.radius)
    return abs(((z - s.point) * s.direction.conjugate()).imag) <= tol * (1.0 + abs(z - s.point))


def point_side(s, z: complex) -> float:
    """Signed position of z relative to s.

    Circle: |z - c| - r (negative inside the disk).  Line: the cross product
    with the direction (positive on the left of the direction).
    """
    if isinstance(s, Circle):
        if is_inf(z):
            return math.inf
        return abs(z - s.center) - s.radius
    if is_inf(z):
        return 0.0
    return ((z - s.point) * s.direction.conjugate()).imag


def fit_support(q1: complex, q2: complex, q3: complex, tol: float = 1e-9):
    """Circle or line through three points; INF forces a line."""
    pts = [q1, q2, q3]
    finite = [p for p in pts if not is_inf(p)]
    if len(finite) < 3:
        if len(finite) < 2:
            raise ValueError("need at least two finite points")
        return Line(finite[0], finite[1] - finite[0])
    v1, v2 = q2 - q1, q3 - q1
    cross = (v1.conjugate() * v2).imag
    scale = max(abs(v1), abs(v2))
    if abs(cross) <= tol * scale * scale:
        return Line(q1, v1 if abs(v1) >= abs(v2) else v2)
    x1, y1, x2, y2, x3, y3 = q1.real, q1.imag, q2.real, q2.imag, q3.real, q3.imag
    d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2))
    s1, s2, s3 = abs(q1) ** 2, abs(q2) ** 2, abs(q3) ** 2
    ux = (s1 * (y2 - y3) + s2 * (y3 - y1) + s3 * (y1 - y2)) / d
    uy = (s1 * (x3 - x2) + s2 * (x1 - x3) + s3 * (x2 - x1)) / d
    center = complex(ux, uy)
    return Circle(center, abs(q1 - center))


def transport_support(g: MoebiusMap, s):
    """The image support g(s)."""
    pole = g.inverse()(INF)
    if not is_inf(pole) and support_contains(s, pole, 1e-10):
        # the image passes through INF, hence is a line; sample away from the pole
        if isinstance(s, Circle):
            ang = cmath.phase(pole - s.center)
            p1 = s.center + s.radius * cmath.exp(1j * (ang + 2.0 * math.pi / 3.0))
            p2 = s.center + s.radius * cmath.exp(1j * (ang - 2.0 * math.pi / 3.0))
        else:
            p1, p2 = pole + s.direction, pole - s.direction
        return Line(g(p1), g(p2) - g(p1))
    a, b, c = (g(p) for p in support_points(s))
    return fit_support(a, b, c)


def same_support(s1, s2, tol: float = 1e-8) -> bool:
    if isinstance(s1, Circle) != isinstance(s2, Circle):
        return False
    if isinstance(s1, Circle):
        return (abs(s1.center - s2.center) <= tol * (1.0 + s1.radius)
                and abs(s1.radius - s2.radius) <= tol * (1.0 + s1.radius))
    if abs((s1.direction.conjugate() * s2.direction).imag) > tol:
        return False
    return abs(((s2.point - s1.point) * s1.direction.conjugate()).imag) <= tol * (
        1.0 + abs(s2.point - s1.point))


def support_intersection(s1, s2, tol: float = 1e-9):
    """Intersection of two supports: (kind, points).

    kind is "equal", "disjoint", "tangent" (one point), "transversal" (two
    points), or "parallel" (distinct parallel lines, meeting only at INF).
    """
    if same_support(s1, s2, tol):
        return "equal", []
    if isinstance(s1, Circle) and isinstance(s2, Circle):
        d = abs(s2.center - s1.center)
        rsum, rdif = s1.radius + s2.radius, abs(s1.radius - s2.radius)
        scale = tol * (1.0 + rsum)
        if d > rsum + scale or d < rdif - scale:
            return "disjoint", []
        u = unit(s2.center - s1.center)
        if abs(d - rsum) <= scale or abs(d - rdif) <= scale:
            sign = 1.0 if abs(d - rsum) <= scale else math.copysign(1.0, s1.radius - s2.radius)
            return "tangent", [s1.center + s1.radius * sign * u]
        a = (d * d + s1.radius ** 2 - s2.radius ** 2) / (2.0 * d)
        h = math.sqrt(max(0.0, s1.radius ** 2 - a * a))
        base = s1.center + a * u
        return "transversal", [base + 1j * h * u, base - 1j * h * u]
    if isinstance(s1, Line) and isinstance(s2, Line):
        cross = (s1.direction.conjugate() * s2.direction).imag
        if abs(cross) < tol:
            return "parallel", []
        t = ((s2.point - s1.point) * s2.direction.conjugate()).imag / (
            (s1.direction * s2.direction.conjugate()).imag)
        return "transversal", [s1.point + t * s1.direction]
    circ, line = (s1, s2) if isinstance(s1, Circle) else (s2, s1)
    beta = ((circ.center - line.point) * line.direction.conjugate()).imag
    scale = tol * (1.0 + circ.radius)
    if abs(beta) > circ.radius + scale:
        return "disjoint", []
    foot = circ.center - beta * 1j * line.direction
    if abs(abs(beta) - circ.radius) <= scale:
        return "tangent", [foot]
    half = math.sqrt(max(0.0, circ.radius ** 2 - beta * beta))
    return "transversal", [foot + half * line.direction, foot - half * line.direction]


# ---------------------------------------------------------------------------
# volumes


_ZETA_EVEN = _zeta(2.0 * np.arange(1, 41))


def lobachevsky(theta: float) -> float:
    """The Lobachevsky function, -integral_0^theta log|2 sin t| dt.

    Odd, pi periodic; evaluated by range reduction to |t| <= pi/2 followed by
    the zeta series t - t log(2t) + sum zeta(2n) t^(2n+1) / (n (2n+1) pi^(2n)).
    """
    t = theta - math.pi * round(theta / math.pi)
    if t == 0.0:
        return 0.0
    sign = math.copysign(1.0, t)
    x = abs(t)
    acc = x - x * math.log(2.0 * x)
    y2 = (x / math.pi) ** 2
    p = x
    for n in range(1, 41):
        p *= y2
        acc += _ZETA_EVEN[n - 1] * p / (n * (2 * n + 1))
    return sign * acc


def ideal_tetrahedron_volume(z: complex) -> float:
    """Volume of the ideal tetrahedron with vertices INF, 0, 1, z (Im z > 0).

    The three horospherical triangle angles feed the Lobachevsky function.
    """
    if z.imag <= 0:
        raise ValueError("shape parameter must lie in the upper half plane")
    a0 = cmath.phase(z)
    a1 = abs(cmath.phase((z - 1.0) / (-1.0)))
    a2 = math.pi - a0 - a1
    return lobachevsky(a0) + lobachevsky(a1) + lobachevsky(a2)
