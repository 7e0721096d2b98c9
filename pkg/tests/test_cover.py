import random

import pytest

from graphshadow import (
    ConstructionError,
    InputError,
    PLMap,
    Q,
    TautCover,
    build_taut_cover,
    core_set,
    lebesgue_number,
    region_diameter,
)
from graphshadow.cover import PLFunction, core_sets
from graphshadow.metric_graph import closed_ball, fatten, point_region_distance
from graphshadow.systems import BUILTIN_SYSTEMS, builtin_system, interval_graph


def brute_lebesgue(cover, per_edge):
    """min over grid points of max_i d(x, X \\ U_i), an upper bound for the exact value."""
    g = cover.graph
    comps = [m.complement() for m in cover.members]
    best = None
    for e, L in enumerate(g.lengths):
        for j in range(per_edge + 1):
            p = g.point(e, L * j / per_edge)
            v = max(point_region_distance(p, c) if not c.is_empty() else Q(0) for c in comps)
            best = v if best is None or v < best else best
    return best


class TestBuildCover:
    def test_tent_eps_one(self, unit, tent_map):
        c = build_taut_cover(unit, tent_map, 1)
        assert not c.problems()
        assert all(d < Q("1/5") for d in c.diameters)
        assert all(d < Q("1/5") for d in c.image_diameters(tent_map))

    def test_hand_cover_is_taut(self, cover3):
        assert cover3.problems() == []
        assert cover3.closure_meets == (frozenset({0, 1}), frozenset({0, 1, 2}), frozenset({1, 2}))

    def test_hand_cover_diameters_are_two_fifths(self, cover3):
        # at eps = 2 the bound eps/5 = 2/5 is not strict for these members
        assert cover3.diameters == (Q("2/5"), Q("2/5"), Q("2/5"))
        assert not cover3.is_valid_for(PLMap.identity(cover3.graph), 2)
        assert cover3.is_valid_for(PLMap.identity(cover3.graph), Q("2.1"))

    def test_single_member_cover(self):
        g = interval_graph(Q("1/10"))
        c = build_taut_cover(g, PLMap.identity(g), 1)
        assert c.k == 1 and c.problems() == []

    @pytest.mark.parametrize("name", sorted(BUILTIN_SYSTEMS))
    def test_builtin_systems(self, name):
        g, f = builtin_system(name)
        c = build_taut_cover(g, f, Q("1/4"))
        assert c.problems() == []
        assert c.is_valid_for(f, Q("1/4"))

    def test_rejects_bad_eps(self, unit, tent_map):
        with pytest.raises(InputError):
            build_taut_cover(unit, tent_map, 0)

    def test_construction_failure_reported(self, unit, tent_map):
        with pytest.raises(ConstructionError, match="cover"):
            build_taut_cover(unit, tent_map, Q("1/4"), max_rounds=0)

    def test_invalid_covers_rejected(self, unit):
        with pytest.raises(InputError, match="cover the graph"):
            TautCover(unit, [unit.interval(0, 0, Q("1/2"), True)])
        with pytest.raises(InputError, match="tautness \\(1\\)"):
            TautCover(unit, [unit.interval(0, 0, Q("1/2"), True), unit.interval(0, Q("1/2"), 1, False, True),
                             unit.interval(0, Q("1/4"), Q("3/4"))])


class TestLebesgue:
    def test_three_cover(self, cover3):
        assert lebesgue_number(cover3) == Q("1/20")
        # the min-max is attained at x = 0.65
        assert brute_lebesgue(cover3, 20) == Q("1/20")

    def test_two_halves(self, unit):
        c = TautCover(unit, [unit.interval(0, 0, Q("0.6"), True), unit.interval(0, Q("0.4"), 1, False, True)])
        assert lebesgue_number(c) == Q("1/10")

    def test_single_member_sentinel(self, circle):
        c = TautCover(circle, [circle.full_region()])
        assert lebesgue_number(c) == region_diameter(circle, circle.full_region()) / 2

    @pytest.mark.parametrize("name", ["tent", "doubling", "yfold"])
    def test_grid_upper_bound(self, name):
        g, f = builtin_system(name)
        c = build_taut_cover(g, f, Q("1/4"))
        assert 0 < lebesgue_number(c) <= brute_lebesgue(c, 64)

    def test_balls_below_lebesgue_fit(self):
        circle, f = builtin_system("rotation")
        c = build_taut_cover(circle, f, Q("1/4"))
        L = lebesgue_number(c)
        rng = random.Random(5)
        for _ in range(200):
            p = circle.full_region().random_point(rng)
            r = closed_ball(circle, p, L / 2 * Q("0.99"))
            assert any(r.issubset(m) for m in c.members)


class TestCoreSets:
    def test_middle_member(self, cover3, unit):
        assert core_set(cover3, 1, Q("1/20")) == unit.interval(0, Q("0.45"), Q("0.55"))

    def test_too_large_eta(self, cover3):
        assert core_set(cover3, 1, Q("1/4")).is_empty()

    def test_single_member(self, circle):
        c = TautCover(circle, [circle.full_region()])
        assert core_set(c, 0, Q("1/3")) == circle.full_region()

    def test_core_sets_far_from_other_closures(self, cover3):
        eta = Q("1/40")
        for i, core in enumerate(core_sets(cover3, eta)):
            assert core.issubset(cover3.members[i])
            for j in range(3):
                if j != i:
                    assert not core.intersects(fatten(cover3.closures[j], eta, closed=True))

    def test_bad_index(self, cover3):
        with pytest.raises(InputError):
            core_set(cover3, 3, Q("1/20"))


class TestPLFunction:
    def test_envelopes(self):
        a = PLFunction.affine(Q(0), Q(1), Q(0), Q(1))
        b = PLFunction.affine(Q(0), Q(1), Q(1), Q(0))
        assert a.maximum(b).min_value() == Q("1/2")
        assert a.minimum(b).max_value() == Q("1/2")
