"""Ideal polyhedra in upper half-space and the cone-manifold verifier.

A polyhedron is described by walls: hemispheres over circles and vertical
planes over lines in the boundary plane, each keeping one side.  A wall
may additionally be clipped to one side of a vertical plane, which is how
a hemisphere gets split into two faces along a geodesic.

``verify`` checks the side-pairing axioms for such a polyhedron: pairings
are inverse pairs carrying faces onto faces with orientation reversed,
edge cycles (including tangency points, which act as edges of length zero
and angle zero) compose to the right kind of isometry for their angle
sum, and ideal vertex classes have parabolic stabilizers.  Edge cycles
with angle sum outside {0, 2pi} are reported as the singular locus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .moebius import (
    INF,
    Circle,
    Line,
    MoebiusMap,
    identity,
    is_inf,
    point_side,
    same_support,
    support_intersection,
    transport_support,
    unit,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Tolerances:
    match: float = 1e-8      # geometric matching of transported edges
    pairing: float = 1e-10   # inverse-pair consistency
    angle: float = 1e-9      # angle-sum comparisons
    geometry: float = 1e-9   # incidence and side tests
    witness: float = 1e-3    # interior witness offset


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Clip:
    """Restriction of a wall to one side of the vertical plane over a line.

    keep=+1 retains the side where point_side is positive, keep=-1 the
    other one.  Points of the line itself belong to both sides.
    """

    line: Line
    keep: int

    def side(self, z):
        return self.keep * point_side(self.line, z)


@dataclass(frozen=True)
class Wall:
    id: str
    support: object          # Circle or Line
    inside: str              # Circle: "in"/"out"; Line: "left"/"right"
    clip: Clip | None = None

    def __post_init__(self):
        if isinstance(self.support, Circle):
            if self.inside not in ("in", "out"):
                raise ValueError("circle wall needs inside in {'in','out'}")
        elif isinstance(self.support, Line):
            if self.inside not in ("left", "right"):
                raise ValueError("line wall needs inside in {'left','right'}")
        else:
            raise TypeError("wall support must be Circle or Line")

    @property
    def sign(self):
        return 1.0 if self.inside in ("out", "left") else -1.0

    def side2d(self, z):
        """Signed boundary-plane side, positive toward the domain."""
        if is_inf(z):
            return self.sign if isinstance(self.support, Circle) else 0.0
        return self.sign * point_side(self.support, z)

    def side3d(self, z, t):
        s = self.support
        if isinstance(s, Circle):
            return self.sign * (math.hypot(abs(z - s.center), t) - s.radius)
        return self.sign * point_side(s, z)

    def inward_normal(self, z, t):
        """Unit normal at a support point, pointing into the domain."""
        s = self.support
        if isinstance(s, Circle):
            w = (z - s.center) / s.radius
            return (self.sign * w.real, self.sign * w.imag, self.sign * t / s.radius)
        n = 1j * s.direction
        return (self.sign * n.real, self.sign * n.imag, 0.0)

    def inward_2d(self, z):
        s = self.support
        if isinstance(s, Circle):
            return self.sign * unit(z - s.center)
        return self.sign * 1j * s.direction

    def in_clip(self, z, tol):
        return self.clip is None or self.clip.side(z) >= -tol


@dataclass(frozen=True)
class SidePairing:
    source: str
    target: str
    map: MoebiusMap


def build_pairings(pairs):
    """Expand one-directional (source, target, map) triples with inverses."""
    out = []
    for src, tgt, g in pairs:
        out.append(SidePairing(src, tgt, g))
        out.append(SidePairing(tgt, src, g.inverse()))
    return tuple(out)


@dataclass
class IdealPolyhedron:
    walls: tuple
    pairings: tuple
    cusps: tuple = ()        # ((point-or-INF, label), ...)

    def __post_init__(self):
        self.walls = tuple(self.walls)
        self.pairings = tuple(self.pairings)
        self.cusps = tuple(self.cusps)

    def wall(self, wid):
        for w in self.walls:
            if w.id == wid:
                return w
        raise KeyError(wid)

    def pairing_from(self, wid):
        for sp in self.pairings:
            if sp.source == wid:
                return sp
        return None


# ---------------------------------------------------------------------------
# dihedral angles


def _seam_pair(w1, w2, tol):
    """True when two walls are the two clipped halves of one support."""
    return (
        w1.clip is not None
        and w2.clip is not None
        and same_support(w1.clip.line, w2.clip.line, tol)
        and w1.clip.keep == -w2.clip.keep
        and w1.inside == w2.inside
    )


def dihedral_angle(w1, w2, tol=1e-9):
    """Interior dihedral angle of two walls, or "tangent"/"disjoint".

    Transversal supports give the angle of the wedge selected by the two
    inside orientations; tangent supports give "tangent" when the faces
    meet from opposite sides and "disjoint" otherwise.  The two halves of
    a split support meet at angle pi along the splitting geodesic.
    """
    s1, s2 = w1.support, w2.support
    if same_support(s1, s2, tol):
        return math.pi if _seam_pair(w1, w2, tol) else "disjoint"
    kind, _ = support_intersection(s1, s2, tol)
    if isinstance(s1, Line) and isinstance(s2, Line):
        if kind == "parallel":
            facing = w1.side2d(s2.point) > tol and w2.side2d(s1.point) > tol
            return "tangent" if facing else "disjoint"
        n1 = w1.sign * 1j * s1.direction
        n2 = w2.sign * 1j * s2.direction
        c = -(n1.real * n2.real + n1.imag * n2.imag)
    elif isinstance(s1, Circle) and isinstance(s2, Circle):
        d2 = abs(s1.center - s2.center) ** 2
        c = (
            w1.sign
            * w2.sign
            * (d2 - s1.radius**2 - s2.radius**2)
            / (2.0 * s1.radius * s2.radius)
        )
    else:
        circ, lin = (w1, w2) if isinstance(s1, Circle) else (w2, w1)
        c = circ.sign * lin.side2d(circ.support.center) / circ.support.radius
    if kind == "disjoint":
        return "disjoint"
    if kind == "tangent":
        return "tangent" if c > 0 else "disjoint"
    return math.acos(max(-1.0, min(1.0, c)))


# ---------------------------------------------------------------------------
# edges


@dataclass(frozen=True)
class Edge:
    kind: str                # "arc", "ray", "tangency", "tangency_inf"
    walls: tuple             # sorted pair of wall ids
    angle: float             # interior dihedral angle, 0.0 for tangencies
    endpoints: tuple         # descriptors; two for arc/ray, one for tangency
    direction: object = None  # germ direction of a clip-constrained tangency

    def __repr__(self):
        return f"Edge({self.kind},{self.walls})"


def _desc(z, t, tol=1e-9):
    return ("ideal", z) if t <= tol else ("fin", z, t)


def _desc_xyz(d):
    if d[0] == "inf":
        return None
    if d[0] == "ideal":
        return (d[1].real, d[1].imag, 0.0)
    return (d[1].real, d[1].imag, d[2])


def _desc_close(a, b, tol):
    pa, pb = _desc_xyz(a), _desc_xyz(b)
    if pa is None or pb is None:
        return pa is None and pb is None
    return (
        abs(pa[0] - pb[0]) <= tol
        and abs(pa[1] - pb[1]) <= tol
        and abs(pa[2] - pb[2]) <= tol
    )


def _transport_desc(g, d):
    if d[0] == "fin":
        z, t = g.apply_h3(d[1], d[2])
        return ("fin", z, t)
    z = g(INF) if d[0] == "inf" else g(d[1])
    return ("inf",) if is_inf(z) else ("ideal", z)


def _desc_key(d):
    p = _desc_xyz(d)
    if p is None:
        return (2, 0.0, 0.0, 0.0)
    return (0 if d[0] == "ideal" else 1, round(p[0], 9), round(p[1], 9), round(p[2], 9))


def _edge_key(e):
    d = (0.0, 0.0) if e.direction is None else (
        round(e.direction.real, 9),
        round(e.direction.imag, 9),
    )
    return (e.walls, e.kind, tuple(sorted(_desc_key(p) for p in e.endpoints)), d)


def _arc_edge(P, w1, w2, p, q, angle, eps):
    """Edge on the geodesic over the chord [p, q], clipped by the other
    walls.  Every wall constraint is linear in t = cos(arc parameter)."""
    m = 0.5 * (p + q)
    u = unit(q - p)
    a = 0.5 * abs(q - p)
    cons = []
    for w3 in P.walls:
        if w3.id in (w1.id, w2.id):
            continue
        s3 = w3.support
        if isinstance(s3, Circle):
            alpha = w3.sign * (abs(m - s3.center) ** 2 + a * a - s3.radius**2)
            beta = w3.sign * 2.0 * a * ((m - s3.center) * u.conjugate()).real
        else:
            alpha = w3.sign * point_side(s3, m)
            beta = w3.sign * a * (u * s3.direction.conjugate()).imag
        cons.append((alpha, beta))
    for w in (w1, w2):
        if w.clip is not None:
            ln = w.clip.line
            cons.append(
                (
                    w.clip.keep * point_side(ln, m),
                    w.clip.keep * a * (u * ln.direction.conjugate()).imag,
                )
            )
    lo, hi = -1.0, 1.0
    for alpha, beta in cons:
        if abs(beta) <= 1e-15:
            if alpha < -eps:
                return []
            continue
        bound = (-alpha - eps) / beta
        if beta > 0:
            lo = max(lo, bound)
        else:
            hi = min(hi, bound)
    if hi - lo <= 1e-7:
        return []

    def pt(tv):
        tv = max(-1.0, min(1.0, tv))
        z = m + a * tv * u
        return _desc(z, a * math.sqrt(max(0.0, 1.0 - tv * tv)), 1e-12)

    pair = tuple(sorted((w1.id, w2.id)))
    return [Edge("arc", pair, angle, (pt(lo), pt(hi)))]


def _ray_edge(P, w1, w2, v, angle, eps):
    """Vertical edge over the 2d point v; constraints are linear in t^2."""
    lo, hi = 0.0, math.inf
    for w3 in P.walls:
        if w3.id in (w1.id, w2.id):
            continue
        s3 = w3.support
        if isinstance(s3, Circle):
            gap = s3.radius**2 - abs(v - s3.center) ** 2
            if w3.sign > 0:
                lo = max(lo, gap - eps)
            elif gap < eps:
                return []
            else:
                hi = min(hi, gap + eps)
        else:
            if w3.side2d(v) < -eps:
                return []
    for w in (w1, w2):
        if not w.in_clip(v, eps):
            return []
    if hi <= lo + eps:
        return []
    bottom = _desc(v, math.sqrt(max(0.0, lo)), 1e-9)
    top = ("inf",) if math.isinf(hi) else ("fin", v, math.sqrt(hi))
    pair = tuple(sorted((w1.id, w2.id)))
    return [Edge("ray", pair, angle, (bottom, top))]


def _tangency_edge(P, w1, w2, p, eps):
    for w3 in P.walls:
        if w3.id in (w1.id, w2.id):
            continue
        if w3.side2d(p) < -eps:
            return []
    for w in (w1, w2):
        if not w.in_clip(p, eps):
            return []
    # both walls clipped with the tangency on a clip line: the kept sides
    # must overlap along the common tangent direction
    s1, s2 = w1.support, w2.support
    if isinstance(s1, Circle) and isinstance(s2, Circle):
        d = 1j * unit(s2.center - s1.center)
    else:
        lin = s1 if isinstance(s1, Line) else s2
        d = lin.direction
    signs = set()
    for w in (w1, w2):
        if w.clip is not None and abs(point_side(w.clip.line, p)) <= eps:
            rate = w.clip.keep * (d * w.clip.line.direction.conjugate()).imag
            if abs(rate) > eps:
                signs.add(1 if rate > 0 else -1)
    if len(signs) == 2:
        return []
    direction = None if not signs else signs.pop() * d
    pair = tuple(sorted((w1.id, w2.id)))
    return [Edge("tangency", pair, 0.0, (("ideal", p),), direction)]


def _tangency_inf_edge(P, w1, w2, eps):
    dir1 = w1.support.direction
    for w3 in P.walls:
        if w3.id in (w1.id, w2.id) or not isinstance(w3.support, Line):
            continue
        if abs((w3.support.direction * dir1.conjugate()).imag) > eps:
            continue
        # a parallel plane strictly between the two severs the strip at INF
        zp = w3.support.point
        if w1.side2d(zp) > eps and w2.side2d(zp) > eps:
            return []
    pair = tuple(sorted((w1.id, w2.id)))
    return [Edge("tangency_inf", pair, 0.0, (("inf",),))]


def _pair_edges(P, w1, w2, eps):
    s1, s2 = w1.support, w2.support
    if same_support(s1, s2, eps):
        if not _seam_pair(w1, w2, eps):
            return []
        ln = w1.clip.line
        kind, pts = support_intersection(s1, ln, eps)
        if kind != "transversal":
            return []
        if isinstance(s1, Circle):
            return _arc_edge(P, w1, w2, pts[0], pts[1], math.pi, eps)
        return _ray_edge(P, w1, w2, pts[0], math.pi, eps)
    kind, pts = support_intersection(s1, s2, eps)
    ang = dihedral_angle(w1, w2, eps)
    if ang == "disjoint":
        return []
    if ang == "tangent":
        if kind == "parallel":
            return _tangency_inf_edge(P, w1, w2, eps)
        return _tangency_edge(P, w1, w2, pts[0], eps)
    if isinstance(s1, Line) and isinstance(s2, Line):
        return _ray_edge(P, w1, w2, pts[0], ang, eps)
    return _arc_edge(P, w1, w2, pts[0], pts[1], ang, eps)


def enumerate_edges(P, tol=DEFAULT_TOL):
    """All generalized edges of the polyhedron: codimension-two faces plus
    tangency points of walls, each tagged with its two walls."""
    eps = tol.geometry
    edges = []
    walls = list(P.walls)
    for i in range(len(walls)):
        for j in range(i + 1, len(walls)):
            edges.extend(_pair_edges(P, walls[i], walls[j], eps))
    edges.sort(key=_edge_key)
    return edges


# ---------------------------------------------------------------------------
# edge cycles


@dataclass
class CycleRecord:
    edges: list              # member edges e_1 .. e_{n-1} in traversal order
    facets: list             # facets s_1 .. s_{n-1} applied in order
    h: MoebiusMap            # cycle transformation g_{s_{n-1}} ... g_{s_1}
    theta: float             # angle sum over member edges
    kind: str                # "interior" or "tangency"
    h_class: str
    h_angle: object
    singular: bool
    ok: bool
    message: str = ""


def _other_wall(edge, wid):
    a, b = edge.walls
    return b if a == wid else a


def _match_edge(candidates, kind, descs, direction, tol):
    tangency = kind in ("tangency", "tangency_inf")
    for e in candidates:
        etang = e.kind in ("tangency", "tangency_inf")
        if etang != tangency:
            continue
        if tangency:
            if not _desc_close(e.endpoints[0], descs[0], tol):
                continue
            if (
                e.direction is not None
                and direction is not None
                and abs(e.direction - direction) > 1e-6
            ):
                continue
            return e
        else:
            a, b = e.endpoints
            p, q = descs
            if (_desc_close(a, p, tol) and _desc_close(b, q, tol)) or (
                _desc_close(a, q, tol) and _desc_close(b, p, tol)
            ):
                return e
    return None


def edge_cycles(P, edges=None, tol=DEFAULT_TOL):
    """Group the edges into cycles under the side pairings.

    Returns (cycles, errors).  Each cycle record carries the ordered member
    edges, the cycle transformation, the angle sum and its classification
    against the expected isometry type.
    """
    if edges is None:
        edges = enumerate_edges(P, tol)
    by_wall = {}
    for e in edges:
        for wid in e.walls:
            by_wall.setdefault(wid, []).append(e)
    pair_from = {sp.source: sp for sp in P.pairings}
    visited = set()
    cycles, errors = [], []
    for start in edges:
        if id(start) in visited:
            continue
        s1 = start.walls[0]
        cur_e, cur_s = start, s1
        member, facets = [], []
        h = identity()
        broken = False
        for _ in range(4 * len(edges) + 8):
            visited.add(id(cur_e))
            member.append(cur_e)
            facets.append(cur_s)
            sp = pair_from.get(cur_s)
            if sp is None:
                errors.append(f"wall {cur_s} has no side pairing")
                broken = True
                break
            h = sp.map @ h
            imgs = tuple(_transport_desc(sp.map, d) for d in cur_e.endpoints)
            direction = None
            if cur_e.direction is not None and cur_e.kind == "tangency":
                p = cur_e.endpoints[0][1]
                den = sp.map.c * p + sp.map.d
                if abs(den) > 1e-12:
                    direction = unit(cur_e.direction / den**2)
            nxt = _match_edge(
                by_wall.get(sp.target, []), cur_e.kind, imgs, direction, tol.match
            )
            if nxt is None:
                errors.append(
                    f"cycle broken at pairing {sp.source}->{sp.target}: image of "
                    f"edge {cur_e.walls} matches no edge on wall {sp.target}"
                )
                broken = True
                break
            s_next = _other_wall(nxt, sp.target)
            if s_next == s1:
                if nxt is not start:
                    errors.append(
                        f"cycle through edge {start.walls} returned to wall {s1} "
                        f"at a different edge {nxt.walls}"
                    )
                    broken = True
                break
            cur_e, cur_s = nxt, s_next
        else:
            errors.append(f"cycle through edge {start.walls} did not close")
            broken = True
        theta = sum(e.angle for e in member)
        record = _classify_cycle(member, facets, h, theta, broken, tol)
        cycles.append(record)
    return cycles, errors


def _classify_cycle(member, facets, h, theta, broken, tol):
    kind, angle = h.classify(1e-8)
    tangency = all(e.angle == 0.0 for e in member)
    singular = not (
        abs(theta) <= tol.angle or abs(theta - TWO_PI) <= tol.angle
    )
    ok, msg = True, ""
    if broken:
        ok, msg = False, "cycle broken"
    elif abs(theta) <= tol.angle:
        if kind != "parabolic":
            ok, msg = False, f"zero angle sum needs a parabolic, got {kind}"
    else:
        k = round(theta / TWO_PI)
        if abs(theta - k * TWO_PI) <= tol.angle and k >= 1:
            if kind != "identity":
                ok, msg = False, f"angle sum {theta:.6f} needs the identity, got {kind}"
        else:
            expected = theta % TWO_PI
            expected = min(expected, TWO_PI - expected)
            if kind != "elliptic":
                ok, msg = False, f"angle sum {theta:.6f} needs an elliptic, got {kind}"
            elif abs(angle - expected) > 1e-8:
                ok, msg = False, (
                    f"elliptic rotation {angle:.9f} does not match angle sum "
                    f"{theta:.9f}"
                )
    return CycleRecord(
        edges=member,
        facets=facets,
        h=h,
        theta=theta,
        kind="tangency" if tangency else "interior",
        h_class=kind,
        h_angle=angle,
        singular=singular,
        ok=ok,
        message=msg,
    )


# ---------------------------------------------------------------------------
# vertex classes


@dataclass
class VertexClass:
    ideal: bool
    size: int
    points: tuple
    rank: object = None      # lattice rank for parabolic classes
    shape: object = None     # Im(w2/w1) of the reduced lattice basis
    tau: object = None
    basis: object = None     # reduced translations at the vertex, short first
    kind: str = ""           # "cusp", "singular_end", "trivial", "finite"
    label: object = None


def _reduce_pair(va, vb):
    a, b = sorted((va, vb), key=abs)
    for _ in range(200):
        n = round((b * a.conjugate()).real / (abs(a) ** 2))
        b = b - n * a
        if abs(b) < 1e-9:
            return [a]
        if abs(b) >= abs(a) - 1e-12:
            return [a, b]
        a, b = b, a
    return [a, b]


def _lattice_basis(translations):
    basis = []
    for v in sorted(translations, key=abs):
        if abs(v) <= 1e-9:
            continue
        for _ in range(200):
            changed = False
            for b in basis:
                n = round((v * b.conjugate()).real / (abs(b) ** 2))
                if n:
                    v = v - n * b
                    changed = True
            if not changed:
                break
        if abs(v) <= 1e-8:
            continue
        if not basis:
            basis = [v]
        elif len(basis) == 1:
            basis = _reduce_pair(basis[0], v)
        else:
            merged = _reduce_pair(basis[0], basis[1])
            if len(merged) == 1:
                basis = _reduce_pair(merged[0], v)
            else:
                basis = merged  # rank two already; v reduces into it
    if len(basis) == 2:
        basis = _reduce_pair(basis[0], basis[1])
    return basis


def _lattice_shape(basis):
    if len(basis) != 2:
        return None, None
    a, b = sorted(basis, key=abs)
    tau = b / a
    if tau.imag < 0:
        tau = -tau
    return tau.imag, tau


def _vertex_classes(P, edges, tol):
    """Orbits of vertices (edge endpoints and tangency points) under the
    side pairings, with stabilizer generators from the transport graph."""
    verts = []
    for e in edges:
        for d in e.endpoints:
            hit = None
            for v in verts:
                if _desc_close(v[0], d, 1e-7):
                    hit = v
                    break
            if hit is None:
                verts.append([d, set(e.walls)])
            else:
                hit[1].update(e.walls)
    pair_from = {sp.source: sp for sp in P.pairings}
    n = len(verts)

    def find(d):
        for k in range(n):
            if _desc_close(verts[k][0], d, 1e-6):
                return k
        return None

    seen = [False] * n
    classes = []
    errors = []
    for root in range(n):
        if seen[root]:
            continue
        comp = [root]
        words = {root: identity()}
        seen[root] = True
        queue = [root]
        gens = []
        while queue:
            v = queue.pop(0)
            for wid in sorted(verts[v][1]):
                sp = pair_from.get(wid)
                if sp is None:
                    continue
                img = _transport_desc(sp.map, verts[v][0])
                u = find(img)
                if u is None:
                    errors.append(
                        f"vertex transport by {sp.source}->{sp.target} leaves the "
                        f"vertex set"
                    )
                    continue
                if not seen[u]:
                    seen[u] = True
                    words[u] = sp.map @ words[v]
                    comp.append(u)
                    queue.append(u)
                else:
                    g = words[u].inverse() @ sp.map @ words[v]
                    if not g.is_identity(1e-8):
                        if all(not g.equals(h, 1e-7) for h in gens):
                            gens.append(g)
        classes.append((comp, gens))

    out = []
    for comp, gens in classes:
        descs = [verts[k][0] for k in comp]
        ideal = descs[0][0] != "fin"
        vc = VertexClass(
            ideal=ideal,
            size=len(comp),
            points=tuple(descs),
        )
        if not ideal:
            vc.kind = "finite"
            out.append(vc)
            continue
        base = descs[0]
        kinds = {}
        for g in gens:
            k, ang = g.classify(1e-8)
            kinds.setdefault(k, []).append((g, ang))
        if "loxodromic" in kinds:
            vc.kind = "invalid"
            errors.append("ideal vertex class with a loxodromic stabilizer element")
        elif "elliptic" in kinds:
            vc.kind = "singular_end"
        elif "parabolic" in kinds:
            vc.kind = "cusp"
            if base[0] == "inf":
                conj = identity()
            else:
                conj = MoebiusMap([[0.0, 1.0], [1.0, -base[1]]])
            translations = []
            for g, _ in kinds["parabolic"]:
                gg = conj @ g @ conj.inverse()
                if abs(gg.c) > 1e-6:
                    errors.append("parabolic stabilizer not fixing its vertex")
                    continue
                translations.append(gg.b / gg.a)
            basis = _lattice_basis(translations)
            vc.rank = len(basis)
            vc.shape, vc.tau = _lattice_shape(basis)
            vc.basis = tuple(sorted(basis, key=abs))
        else:
            vc.kind = "trivial"
            vc.rank = 0
        if vc.kind == "cusp" and vc.rank is None:
            vc.rank = 0
        out.append(vc)

    # attach cusp labels
    for vc in out:
        if not vc.ideal:
            continue
        for pt, lab in P.cusps:
            target = ("inf",) if is_inf(pt) else ("ideal", pt)
            if any(_desc_close(d, target, 1e-6) for d in vc.points):
                vc.label = lab
                break
    return out, errors


# ---------------------------------------------------------------------------
# facet samples and witnesses


def _support_points(w, krad=48):
    s = w.support
    pts = []
    if isinstance(s, Circle):
        for k in range(krad):
            phi = TWO_PI * (k + 0.37) / krad
            pts.append(s.center + s.radius * complex(math.cos(phi), math.sin(phi)))
    else:
        for t in (-8.0, -4.0, -2.0, -1.0, -0.5, -0.25, -0.1, 0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0):
            pts.append(s.point + t * s.direction)
    return pts


def _facet_samples_2d(P, w, eps):
    """Boundary-plane points of the facet of w, biased toward its middle."""
    scored = []
    for z in _support_points(w):
        if w.clip is not None:
            cs = w.clip.side(z)
            if cs < eps:
                continue
        else:
            cs = math.inf
        slack = cs
        good = True
        for w3 in P.walls:
            if w3.id == w.id:
                continue
            s = w3.side2d(z)
            if isinstance(w3.support, Circle) or not is_inf(z):
                if s < -1e-9:
                    good = False
                    break
                slack = min(slack, s)
        if good:
            scored.append((slack, z))
    scored.sort(key=lambda t: -t[0])
    return [z for _, z in scored[:12]]


def _facet_sample_3d(P, w):
    """An interior point of the facet of w on its support surface."""
    s = w.support
    candidates = []
    if isinstance(s, Circle):
        for kpsi in range(1, 7):
            psi = kpsi * math.pi / 14.0
            for k in range(24):
                phi = TWO_PI * (k + 0.41) / 24
                z = s.center + s.radius * math.sin(psi) * complex(
                    math.cos(phi), math.sin(phi)
                )
                candidates.append((z, s.radius * math.cos(psi)))
    else:
        for t in (-6.0, -3.0, -1.5, -0.8, -0.4, -0.15, 0.0, 0.15, 0.4, 0.8, 1.5, 3.0, 6.0):
            for tau in (0.15, 0.4, 1.0, 2.5, 6.0):
                candidates.append((s.point + t * s.direction, tau))
    best, best_slack = None, 0.0
    for z, t in candidates:
        slack = math.inf
        if w.clip is not None:
            slack = w.clip.side(z)
            if slack <= 0:
                continue
        ok = True
        for w3 in P.walls:
            if w3.id == w.id:
                continue
            sv = w3.side3d(z, t)
            if sv < 1e-9:
                ok = False
                break
            slack = min(slack, sv)
        if ok and slack > best_slack:
            best, best_slack = (z, t), slack
    return best


def interior_point(P, tol=DEFAULT_TOL):
    """A point strictly inside the polyhedron, or None."""
    xs, ys, rad = [], [], []
    for w in P.walls:
        s = w.support
        if isinstance(s, Circle):
            xs += [s.center.real - s.radius, s.center.real + s.radius]
            ys += [s.center.imag - s.radius, s.center.imag + s.radius]
            rad.append(s.radius)
        else:
            xs.append(s.point.real)
            ys.append(s.point.imag)
    if not xs:
        return None
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    scale = max(rad) if rad else max(x1 - x0, y1 - y0, 1.0)
    best, best_slack = None, 0.0
    for f in (0.02, 0.06, 0.15, 0.4, 1.0, 2.5, 6.0, 15.0):
        t = f * scale
        for i in range(17):
            for j in range(17):
                z = complex(x0 + (x1 - x0) * i / 16.0, y0 + (y1 - y0) * j / 16.0)
                slack = min(w.side3d(z, t) for w in P.walls)
                if slack > best_slack:
                    best, best_slack = (z, t), slack
    return best


# ---------------------------------------------------------------------------
# verification


@dataclass
class SingularClass:
    angle: float
    cycles: tuple            # indices into the cycle list
    edge_count: int


@dataclass
class VerifierReport:
    ok: bool
    conditions: dict
    cycles: list
    singular_classes: list
    vertex_classes: list
    presentation: dict
    errors: list


def _structure_errors(P):
    errors = []
    ids = [w.id for w in P.walls]
    if len(set(ids)) != len(ids):
        errors.append("duplicate wall ids")
    sources = [sp.source for sp in P.pairings]
    if sorted(sources) != sorted(ids):
        errors.append("side pairings must use every wall exactly once as source")
    for sp in P.pairings:
        if sp.target not in ids:
            errors.append(f"pairing target {sp.target} is not a wall")
    for i, w1 in enumerate(P.walls):
        for w2 in P.walls[i + 1 :]:
            if same_support(w1.support, w2.support, 1e-9) and not _seam_pair(
                w1, w2, 1e-9
            ):
                errors.append(
                    f"walls {w1.id} and {w2.id} share a support without "
                    f"complementary clips"
                )
    return errors


def _check_pairings(P, tol):
    """Conditions: inverse pairs, faces onto faces, interior to exterior."""
    errors_i, errors_ii, errors_iii = [], [], []
    inconclusive = []
    pair_from = {sp.source: sp for sp in P.pairings}
    for sp in P.pairings:
        back = pair_from.get(sp.target)
        if back is None or back.target != sp.source:
            errors_ii.append(f"pairing {sp.source}->{sp.target} has no inverse mate")
            continue
        if not (back.map @ sp.map).is_identity(tol.pairing):
            errors_ii.append(
                f"(ii) pairing {sp.target}->{sp.source} is not inverse to "
                f"{sp.source}->{sp.target}"
            )
    for sp in P.pairings:
        w_from = P.wall(sp.source)
        w_to = P.wall(sp.target)
        img = transport_support(sp.map, w_from.support)
        if not same_support(img, w_to.support, tol.match):
            errors_i.append(
                f"(i) pairing {sp.source}->{sp.target}: image support does not "
                f"match the target support"
            )
            continue
        for z in _facet_samples_2d(P, w_from, 1e-7):
            zi = sp.map(z)
            if is_inf(zi):
                continue
            if w_to.clip is not None and w_to.clip.side(zi) < -1e-6:
                errors_i.append(
                    f"(i) pairing {sp.source}->{sp.target}: facet image violates "
                    f"the clip of {sp.target}"
                )
                break
        sample = _facet_sample_3d(P, w_from)
        if sample is None:
            inconclusive.append(sp.source)
            continue
        z, t = sample
        nx, ny, nt = w_from.inward_normal(z, t)
        eps = tol.witness
        witness = None
        for _ in range(4):
            wz = complex(z.real + eps * nx, z.imag + eps * ny)
            wt = t + eps * nt
            if wt > 0 and all(w.side3d(wz, wt) > 0 for w in P.walls):
                witness = (wz, wt)
                break
            eps *= 0.1
        if witness is None:
            inconclusive.append(sp.source)
            continue
        iz, it = sp.map.apply_h3(*witness)
        if w_to.side3d(iz, it) >= 0:
            errors_iii.append(
                f"(iii) pairing {sp.source}->{sp.target}: interior witness does "
                f"not map to the exterior side of {sp.target}"
            )
    return errors_i, errors_ii, errors_iii, inconclusive


def _singular_classes(cycles, tol):
    """Singular cycles grouped by shared finite endpoints: one class per
    connected component of the singular locus."""
    idx = [i for i, c in enumerate(cycles) if c.singular]
    pts = {}
    for i in idx:
        fin = []
        for e in cycles[i].edges:
            for d in e.endpoints:
                if d[0] == "fin":
                    fin.append(_desc_xyz(d))
        pts[i] = fin
    parent = {i: i for i in idx}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a in idx:
        for b in idx:
            if b <= a:
                continue
            close = any(
                abs(pa[0] - pb[0]) < 1e-7
                and abs(pa[1] - pb[1]) < 1e-7
                and abs(pa[2] - pb[2]) < 1e-7
                for pa in pts[a]
                for pb in pts[b]
            )
            if close:
                parent[find(b)] = find(a)
    groups = {}
    for i in idx:
        groups.setdefault(find(i), []).append(i)
    out, errors = [], []
    for root in sorted(groups):
        members = sorted(groups[root])
        angles = [cycles[i].theta for i in members]
        if max(angles) - min(angles) > tol.angle:
            errors.append(
                "singular class with inconsistent angle sums: "
                + ", ".join(f"{a:.9f}" for a in angles)
            )
        out.append(
            SingularClass(
                angle=angles[0],
                cycles=tuple(members),
                edge_count=sum(len(cycles[i].edges) for i in members),
            )
        )
    return out, errors


def _presentation(P, cycles):
    pair_from = {sp.source: sp for sp in P.pairings}
    keys = sorted({tuple(sorted((sp.source, sp.target))) for sp in P.pairings})
    names = {k: f"g[{k[0]}|{k[1]}]" for k in keys}

    def word(facets):
        toks = []
        for s in facets:
            sp = pair_from[s]
            k = tuple(sorted((sp.source, sp.target)))
            toks.append(names[k] + ("" if s == k[0] else "^-1"))
        return " ".join(toks)

    relators, parabolic, cone = [], [], []
    for c in cycles:
        w = word(c.facets)
        if abs(c.theta) <= 1e-9:
            parabolic.append(w)
        elif c.singular:
            cone.append((c.theta, w))
        else:
            relators.append(w)
    return {
        "generators": [names[k] for k in keys],
        "relators": relators,
        "parabolic": parabolic,
        "cone": cone,
    }


def verify(P, tol=DEFAULT_TOL):
    """Run the full battery of side-pairing checks and return a report."""
    errors = list(_structure_errors(P))
    conditions = {}
    if errors:
        conditions["pairing_bijection"] = "fail"
        return VerifierReport(False, conditions, [], [], [], {}, errors)
    conditions["pairing_bijection"] = "pass"

    if interior_point(P, tol) is None:
        errors.append("no interior point found: the common exterior looks empty")

    e_i, e_ii, e_iii, inconclusive = _check_pairings(P, tol)
    errors += e_i + e_ii + e_iii
    conditions["i"] = "fail" if e_i else "pass"
    conditions["ii"] = "fail" if e_ii else "pass"
    if e_iii:
        conditions["iii"] = "fail"
    elif inconclusive:
        conditions["iii"] = "inconclusive"
    else:
        conditions["iii"] = "pass"

    edges = enumerate_edges(P, tol)
    cycles, cycle_errors = ([], []) if conditions["i"] == "fail" else edge_cycles(
        P, edges, tol
    )
    errors += cycle_errors
    bad_cycles = [c for c in cycles if not c.ok]
    for c in bad_cycles:
        errors.append(f"cycle through {c.edges[0].walls}: {c.message}")
    conditions["v"] = "fail" if (bad_cycles or cycle_errors) else "pass"

    singular, serr = _singular_classes(cycles, tol)
    errors += serr

    vclasses, verr = ([], []) if conditions["i"] == "fail" else _vertex_classes(
        P, edges, tol
    )
    errors += verr
    sing_angles = [s.angle for s in singular]
    for vc in vclasses:
        if not vc.ideal:
            continue
        if vc.kind == "invalid":
            continue
        if vc.kind == "singular_end":
            # the rotation at a singular end must match some cone angle
            matched = bool(sing_angles)
            if not matched:
                errors.append(
                    "ideal vertex class with elliptic stabilizer but no singular "
                    "cycle to account for it"
                )
    conditions["iv"] = "fail" if verr else "pass"

    presentation = _presentation(P, cycles) if cycles else {}
    ok = (
        not errors
        and conditions["i"] == "pass"
        and conditions["ii"] == "pass"
        and conditions["iii"] != "fail"
        and conditions["v"] == "pass"
    )
    return VerifierReport(
        ok=ok,
        conditions=conditions,
        cycles=cycles,
        singular_classes=singular,
        vertex_classes=vclasses,
        presentation=presentation,
        errors=errors,
    )


# ---------------------------------------------------------------------------
# conjugation


def _sample_avoiding_pole(w, g):
    for z in _support_points(w, krad=24):
        zin = z + 1e-5 * w.inward_2d(z)
        if not is_inf(g(z)) and not is_inf(g(zin)):
            return z, zin
    raise ValueError("no support sample avoids the pole")


def conjugate_polyhedron(P, g):
    """The polyhedron g(P) with pairings conjugated by g.

    Clips are transported through their ideal chord endpoints; a clipped
    wall whose image support is a line is not supported.
    """
    new_walls = []
    for w in P.walls:
        s2 = transport_support(g, w.support)
        z0, zin = _sample_avoiding_pole(w, g)
        side = point_side(s2, g(zin))
        if isinstance(s2, Circle):
            inside = "in" if side < 0 else "out"
        else:
            inside = "left" if side > 0 else "right"
        clip2 = None
        if w.clip is not None:
            if isinstance(s2, Line):
                raise ValueError("clip transport onto a plane wall not supported")
            kind, pts = support_intersection(w.support, w.clip.line, 1e-9)
            if kind != "transversal":
                raise ValueError("clip line must cross its wall support")
            p1, q1 = g(pts[0]), g(pts[1])
            if is_inf(p1) or is_inf(q1):
                raise ValueError("clip transport hit the pole")
            ln = Line(p1, q1 - p1)
            zk = max(
                _support_points(w, krad=24), key=lambda z: w.clip.side(z)
            )
            keep2 = 1 if point_side(ln, g(zk)) > 0 else -1
            clip2 = Clip(ln, keep2)
        new_walls.append(Wall(w.id, s2, inside, clip2))
    ginv = g.inverse()
    new_pairings = tuple(
        SidePairing(sp.source, sp.target, g @ sp.map @ ginv) for sp in P.pairings
    )
    new_cusps = []
    for pt, lab in P.cusps:
        q = g(INF) if is_inf(pt) else g(pt)
        new_cusps.append((INF if is_inf(q) else q, lab))
    return IdealPolyhedron(new_walls, new_pairings, tuple(new_cusps))
