"""Verifier tests on hand-checked fixtures.

The chimney column over a unit square (rank-2 parabolic group) and the
one-parameter family of cone deformations of the Borromean-rings domain
are small enough that the full cell structure (edge counts, cycle counts,
angle sums, cusp shapes) can be worked out by hand; those counts are
asserted here.
"""

import math

import pytest

from hyperjoint.moebius import INF, Circle, Line, MoebiusMap, fold_map, translation
from hyperjoint.polyhedron import (
    Clip,
    IdealPolyhedron,
    Tolerances,
    Wall,
    build_pairings,
    conjugate_polyhedron,
    dihedral_angle,
    edge_cycles,
    enumerate_edges,
    verify,
)

TWO_PI = 2.0 * math.pi


def chimney():
    walls = (
        Wall("x0", Line(0.0, 1j), "right"),
        Wall("x1", Line(1.0, 1j), "left"),
        Wall("y0", Line(0.0, 1.0), "left"),
        Wall("y1", Line(1j, 1.0), "right"),
    )
    pairings = build_pairings(
        [("x0", "x1", translation(1.0)), ("y0", "y1", translation(1j))]
    )
    return IdealPolyhedron(walls, pairings, cusps=((INF, "top"),))


def classical(r):
    """Box [-1/2,1/2] x [-2r,2r] minus eight radius-r domes, with the
    pairings that make it a fundamental domain for the cone family."""
    y_split = Line(0.0, 1.0)
    lower = Clip(y_split, -1)
    upper = Clip(y_split, +1)
    walls = (
        Wall("L", Line(-0.5, 1j), "right"),
        Wall("R", Line(0.5, 1j), "left"),
        Wall("B", Line(-2j * r, 1.0), "left"),
        Wall("T", Line(2j * r, 1.0), "right"),
        Wall("1", Circle(-1j * r, r), "out"),
        Wall("2", Circle(1j * r, r), "out"),
        Wall("3l", Circle(r, r), "out", lower),
        Wall("3u", Circle(r, r), "out", upper),
        Wall("4l", Circle(-r, r), "out", lower),
        Wall("4u", Circle(-r, r), "out", upper),
        Wall("5", Circle(r - 2j * r, r), "out"),
        Wall("6", Circle(-r - 2j * r, r), "out"),
        Wall("7", Circle(r + 2j * r, r), "out"),
        Wall("8", Circle(-r + 2j * r, r), "out"),
    )
    pairings = build_pairings(
        [
            ("L", "R", translation(1.0)),
            ("B", "T", translation(4j * r)),
            ("1", "2", fold_map(-1j * r, r, 0.0)),
            ("5", "3l", fold_map(r - 2j * r, r, -r)),
            ("7", "3u", fold_map(r + 2j * r, r, r)),
            ("6", "4l", fold_map(-r - 2j * r, r, -r)),
            ("8", "4u", fold_map(-r + 2j * r, r, r)),
        ]
    )
    cusps = ((INF, "alpha1"), (0.0, "mu1"), (r - 1j * r, "chi"), (-r - 1j * r, "chi"))
    return IdealPolyhedron(walls, pairings, cusps=cusps)


class TestDihedralAngle:
    def test_perpendicular_circles(self):
        w1 = Wall("a", Circle(1j / 3, 1 / 3), "out")
        w2 = Wall("b", Circle(1 / 3, 1 / 3), "out")
        assert dihedral_angle(w1, w2) == pytest.approx(math.pi / 2, abs=1e-12)

    def test_circle_line_pi_third(self):
        w1 = Wall("a", Circle(1 / 3, 1 / 3), "out")
        w2 = Wall("b", Line(0.5, 1j), "left")
        assert dihedral_angle(w1, w2) == pytest.approx(math.pi / 3, abs=1e-12)

    def test_externally_tangent(self):
        w1 = Wall("a", Circle(0.0, 1 / 3), "out")
        w2 = Wall("b", Circle(2 / 3, 1 / 3), "out")
        assert dihedral_angle(w1, w2) == "tangent"

    def test_far_apart(self):
        w1 = Wall("a", Circle(0.0, 1 / 3), "out")
        w2 = Wall("b", Circle(9.0, 1 / 3), "out")
        assert dihedral_angle(w1, w2) == "disjoint"

    def test_nested(self):
        w1 = Wall("a", Circle(0.0, 1.0), "out")
        w2 = Wall("b", Circle(0.1, 0.2), "out")
        assert dihedral_angle(w1, w2) == "disjoint"

    def test_crossing_planes(self):
        w1 = Wall("a", Line(0.0, 1j), "right")
        w2 = Wall("b", Line(0.0, 1.0), "left")
        assert dihedral_angle(w1, w2) == pytest.approx(math.pi / 2, abs=1e-12)


class TestEnumerateEdges:
    def test_disjoint_hemispheres(self):
        walls = (
            Wall("a", Circle(0.0, 1.0), "out"),
            Wall("b", Circle(9.0, 1.0), "out"),
        )
        p = IdealPolyhedron(walls, ())
        assert enumerate_edges(p) == []

    def test_chimney_inventory(self):
        edges = enumerate_edges(chimney())
        kinds = sorted(e.kind for e in edges)
        assert kinds == ["ray"] * 4 + ["tangency_inf"] * 2
        for e in edges:
            if e.kind == "ray":
                assert e.angle == pytest.approx(math.pi / 2, abs=1e-12)

    def test_classical_inventory(self):
        edges = enumerate_edges(classical(1 / 3))
        assert len(edges) == 39
        by_kind = {}
        for e in edges:
            by_kind.setdefault(e.kind, []).append(e)
        assert len(by_kind["ray"]) == 4
        assert len(by_kind["tangency_inf"]) == 2
        assert len(by_kind["tangency"]) == 11
        assert len(by_kind["arc"]) == 22
        pi_edges = [e for e in by_kind["arc"] if abs(e.angle - math.pi) < 1e-9]
        assert sorted(e.walls for e in pi_edges) == [("3l", "3u"), ("4l", "4u")]
        # the four-plus-four rim arcs carry the cone angle quarter
        theta = 4 * math.pi / 3
        rim = [e for e in by_kind["arc"] if abs(e.angle - theta / 4) < 1e-9]
        assert len(rim) == 8


class TestChimneyVerify:
    def test_cycles(self):
        p = chimney()
        cycles, errors = edge_cycles(p, enumerate_edges(p))
        assert errors == []
        assert len(cycles) == 3
        sums = sorted(c.theta for c in cycles)
        assert sums[0] == pytest.approx(0.0, abs=1e-12)
        assert sums[1] == pytest.approx(0.0, abs=1e-12)
        assert sums[2] == pytest.approx(TWO_PI, abs=1e-12)
        classes = sorted(c.h_class for c in cycles)
        assert classes == ["identity", "parabolic", "parabolic"]

    def test_verify_passes(self):
        report = verify(chimney())
        assert report.ok
        assert report.singular_classes == []
        ideal = [v for v in report.vertex_classes if v.ideal]
        inf_class = [v for v in ideal if v.label == "top"]
        assert len(inf_class) == 1
        assert inf_class[0].rank == 2
        assert inf_class[0].shape == pytest.approx(1.0, abs=1e-9)
        corner = [v for v in ideal if v.size == 4]
        assert len(corner) == 1 and corner[0].rank == 0

    def test_corruption_fails_condition_i(self):
        p = chimney()
        bad = []
        for sp in p.pairings:
            if sp.source == "x0":
                bad.append(type(sp)("x0", "x1", MoebiusMap([[1, 0], [0, 1]])))
            elif sp.source == "x1":
                bad.append(type(sp)("x1", "x0", MoebiusMap([[1, 0], [0, 1]])))
            else:
                bad.append(sp)
        report = verify(IdealPolyhedron(p.walls, tuple(bad), cusps=p.cusps))
        assert not report.ok
        assert report.conditions["i"] == "fail"
        assert any("x0" in msg for msg in report.errors)

    def test_conjugation_invariance(self):
        p = chimney()
        base = verify(p)
        g = MoebiusMap([[0.0, 1.0], [1.0, -(5.0 + 5j)]])
        q = conjugate_polyhedron(p, g)
        moved = verify(q)
        assert moved.ok
        assert len(moved.cycles) == len(base.cycles)
        assert sorted(c.theta for c in moved.cycles) == pytest.approx(
            sorted(c.theta for c in base.cycles), abs=1e-8
        )
        base_shapes = sorted(v.shape for v in base.vertex_classes if v.shape)
        moved_shapes = sorted(v.shape for v in moved.vertex_classes if v.shape)
        assert moved_shapes == pytest.approx(base_shapes, abs=1e-8)


class TestClassicalVerify:
    def test_generic_cone_angle(self):
        theta = 4 * math.pi / 3
        report = verify(classical(1 / 3))
        assert report.ok
        assert len(report.cycles) == 17
        singular = [c for c in report.cycles if c.singular]
        assert len(singular) == 2
        for c in singular:
            assert c.theta == pytest.approx(theta, abs=1e-9)
            t2 = c.h.trace() ** 2
            assert abs(t2 - 4.0 * math.cos(theta / 2.0) ** 2) < 1e-8
        assert len(report.singular_classes) == 1
        assert report.singular_classes[0].angle == pytest.approx(theta, abs=1e-9)

    def test_generic_cusps(self):
        report = verify(classical(1 / 3))
        ideal = [v for v in report.vertex_classes if v.ideal]
        finite = [v for v in report.vertex_classes if not v.ideal]
        assert len(ideal) == 6
        assert len(finite) == 1 and finite[0].size == 6
        by_label = {v.label: v for v in ideal if v.label}
        assert by_label["alpha1"].shape == pytest.approx(4 / 3, abs=1e-9)
        assert by_label["mu1"].shape == pytest.approx(2.0, abs=1e-9)
        assert by_label["chi"].rank == 1
        ends = [v for v in ideal if v.kind == "singular_end"]
        assert len(ends) == 2

    def test_borromean_limit(self):
        report = verify(classical(0.5))
        assert report.ok
        assert report.singular_classes == []
        assert len(report.cycles) == 18
        shapes = sorted(v.shape for v in report.vertex_classes if v.shape)
        assert shapes == pytest.approx([2.0, 2.0, 2.0], abs=1e-9)

    def test_lantern_limit(self):
        report = verify(classical(0.25))
        assert report.ok
        assert report.singular_classes == []
        assert len(report.cycles) == 17
        ideal = [v for v in report.vertex_classes if v.ideal]
        assert all(not v.ideal or v.kind != "singular_end" for v in ideal)
        by_label = {v.label: v for v in ideal if v.label}
        assert by_label["alpha1"].shape == pytest.approx(1.0, abs=1e-9)
        assert by_label["mu1"].shape == pytest.approx(2.0, abs=1e-9)
        seam = [v for v in ideal if v.size == 6]
        assert len(seam) == 1 and seam[0].rank == 1

    def test_theta_continuity(self):
        # excess Sum(2pi - theta(e)) over cycles moves continuously in theta
        prev = None
        for k in range(1, 11):
            theta = TWO_PI * k / 11.0
            r = 0.25 / math.cos(theta / 8.0) ** 2
            report = verify(classical(r))
            assert report.ok
            assert len(report.singular_classes) == 1
            assert report.singular_classes[0].angle == pytest.approx(theta, abs=1e-8)
            excess = sum(TWO_PI - c.theta for c in report.cycles if c.singular)
            if prev is not None:
                assert abs(excess - prev) < 2.0
            prev = excess

    def test_corrupted_pairing(self):
        p = classical(1 / 3)
        bad = []
        for sp in p.pairings:
            if sp.source in ("1", "2"):
                bad.append(type(sp)(sp.source, sp.target, MoebiusMap([[1, 0], [0, 1]])))
            else:
                bad.append(sp)
        report = verify(IdealPolyhedron(p.walls, tuple(bad), cusps=p.cusps))
        assert not report.ok
        assert report.conditions["i"] == "fail"
