"""Plane-pair factorization, polyconvex hulls, Caratheodory splitting."""
import random
from fractions import Fraction as F

import numpy as np
import pytest

from rohull.core import GeometryError, Mat2, det, rank2x2
from rohull.pchull import (
    OutsideHullError,
    caratheodory_decompose,
    convex_hull_2d,
    pairwise_det_check,
    pc_hull,
    plane_pair,
    polygon_contains,
    to_rows,
)

class TestPlanePair:
    def test_left_right_split(self):
        pp = plane_pair(Mat2(1, 0, 0, 0), Mat2.zero())
        # every matrix whose rows are multiples of (1, 0) is in one plane,
        # every matrix whose columns are multiples of (1, 0)^T in the other
        assert pp.p1.contains(Mat2(2, 0, 5, 0)) or pp.p2.contains(
            Mat2(2, 0, 5, 0))
        assert pp.p1.contains(Mat2(3, 7, 0, 0)) or pp.p2.contains(
            Mat2(3, 7, 0, 0))

    def test_rank_two_difference_rejected(self):
        with pytest.raises(GeometryError, match="not rank-one"):
            plane_pair(Mat2(1, 0, 0, 1), Mat2.zero())

    def test_planes_meet_along_the_difference(self):
        x0 = Mat2(2, 1, 4, 2)  # rank one
        y0 = Mat2.zero()
        pp = plane_pair(x0, y0)
        assert pp.p1.contains(x0) and pp.p1.contains(y0)
        assert pp.p2.contains(x0) and pp.p2.contains(y0)
        d = Mat2.from_rows(pp.intersection_direction)
        assert det(d) == 0 and not d.is_zero()

    def test_within_plane_rank_condition(self):
        pp = plane_pair(Mat2(1, 2, 3, 6), Mat2.zero())
        rng = random.Random(7)
        for _ in range(50):
            s, t = (F(rng.randint(-9, 9), rng.randint(1, 9))
                    for _ in range(2))
            a = Mat2.from_rows(pp.p1.matrix_at((s, t)))
            b = Mat2.from_rows(pp.p1.matrix_at((t, s + 1)))
            if a != b:
                assert rank2x2(a - b) <= 1
            c = Mat2.from_rows(pp.p2.matrix_at((s, t)))
            d2 = Mat2.from_rows(pp.p2.matrix_at((t, s + 1)))
            if c != d2:
                assert rank2x2(c - d2) <= 1

    def test_cross_plane_rank_two(self):
        pp = plane_pair(Mat2(1, 2, 3, 6), Mat2.zero())
        rng = random.Random(11)
        hits = 0
        for _ in range(100):
            coords = [F(rng.randint(-9, 9), rng.randint(1, 9))
                      for _ in range(4)]
            a = pp.p1.matrix_at((coords[0], coords[1]))
            b = pp.p2.matrix_at((coords[2], coords[3]))
            if pp.p1.contains(b) or pp.p2.contains(a):
                continue
            assert rank2x2(Mat2.from_rows(a) - Mat2.from_rows(b)) == 2
            hits += 1
        assert hits > 50

    def test_float_inputs_supported(self):
        x0 = np.array([[1.0, 0.5], [2.0, 1.0]])
        pp = plane_pair(Mat2(*x0.flatten()), Mat2(0.0, 0.0, 0.0, 0.0))
        assert pp.p1.contains(Mat2(*x0.flatten()))


class TestConvexHull2D:
    def test_square(self):
        pts = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1)]
        hull = convex_hull_2d([(F(x), F(y)) for x, y in pts])
        assert len(hull) == 4
        assert (F(1), F(1)) not in hull

    def test_collinear(self):
        hull = convex_hull_2d([(F(0), F(0)), (F(1), F(1)), (F(2), F(2))])
        assert len(hull) == 2

    def test_contains(self):
        square = [(F(0), F(0)), (F(2), F(0)), (F(2), F(2)), (F(0), F(2))]
        assert polygon_contains(square, (F(1), F(1)))
        assert polygon_contains(square, (F(0), F(1)))  # boundary counts
        assert not polygon_contains(square, (F(3), F(1)))


class TestDetCheck:
    def test_passes_on_nonneg(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2.diag(1, 1)]
        rep = pairwise_det_check(k)
        assert rep.passed

    def test_flags_violation(self):
        rep = pairwise_det_check([Mat2.zero(), Mat2(1, 0, 0, -1)])
        assert not rep.passed
        assert rep.violating_pair == (0, 1)


class TestPcHull:
    def test_negative_det_rejected(self):
        with pytest.raises(GeometryError, match="det sign"):
            pc_hull([Mat2.zero(), Mat2.diag(1, -1)])

    def test_no_connections_all_singletons(self):
        k = [Mat2.zero(), Mat2.diag(1, 1), Mat2.diag(3, 2)]
        h = pc_hull(k)
        assert h.planes == ()
        assert h.singleton_indices == (0, 1, 2)

    def test_triangle_membership(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0)]
        h = pc_hull(k)
        assert h.membership(Mat2(F(1, 3), F(1, 3), 0, 0))
        assert h.membership(Mat2(F(1, 2), F(1, 2), 0, 0))
        assert not h.membership(Mat2(F(2, 3), F(2, 3), 0, 0))
        assert not h.membership(Mat2(0, 0, F(1, 3), 0))

    def test_members_are_always_in(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0),
             Mat2.diag(5, 5)]
        h = pc_hull(k)
        for m in k:
            assert h.membership(m)


class TestCaratheodory:
    def test_interior_point_three_weights(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0)]
        h = pc_hull(k)
        plane = h.planes[0]
        target = Mat2(F(1, 4), F(1, 4), 0, 0)
        res = caratheodory_decompose(
            plane.plane, [k[i] for i in plane.indices], target)
        assert sum(res.weights) == 1
        assert all(w >= 0 for w in res.weights)
        assert res.reconstruct() == target.rows()

    def test_vertex_is_trivial(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0)]
        h = pc_hull(k)
        plane = h.planes[0]
        res = caratheodory_decompose(
            plane.plane, [k[i] for i in plane.indices], k[1])
        assert sorted(res.weights, reverse=True)[0] == 1

    def test_outside_raises_with_direction(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0)]
        h = pc_hull(k)
        plane = h.planes[0]
        with pytest.raises(OutsideHullError) as exc:
            caratheodory_decompose(
                plane.plane, [k[i] for i in plane.indices],
                Mat2(F(5), F(5), 0, 0))
        assert exc.value.direction is not None

    def test_two_step_realization_is_rank_one(self):
        k = [Mat2.zero(), Mat2(1, 0, 0, 0), Mat2(0, 1, 0, 0)]
        h = pc_hull(k)
        plane = h.planes[0]
        target = Mat2(F(1, 3), F(1, 3), 0, 0)
        res = caratheodory_decompose(
            plane.plane, [k[i] for i in plane.indices], target)
        mid = Mat2.from_rows(res.intermediate)
        first = Mat2.from_rows(to_rows(res.points[0]))
        if mid != first:
            # first split stays along a rank-one line inside the plane
            assert det(mid - first) == 0
        # second split reassembles the target from the intermediate point
        total = mid.scale(res.intermediate_weight)
        for p, w in list(zip(res.points, res.weights))[2:]:
            total = total + Mat2.from_rows(to_rows(p)).scale(w)
        assert total == target
