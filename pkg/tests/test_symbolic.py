import itertools

import pytest

from graphshadow import (
    InputError,
    PLMap,
    Q,
    TransitionRelation,
    compute_transition,
    count_walks,
    enumerate_patterns,
    image_region,
)
from graphshadow.metric_graph import fatten
from graphshadow.systems import builtin_system
from graphshadow import build_taut_cover


class TestTransition:
    def test_tent_three_cover(self, tent_map, cover3):
        rel = compute_transition(tent_map, cover3)
        # T([0,.4]) = [0,.8], T([.3,.7]) = [.6,1], T([.6,1]) = [0,.8]
        assert rel.successors == (frozenset({0, 1, 2}), frozenset({1, 2}), frozenset({0, 1, 2}))

    def test_identity_gives_nerve(self, unit, cover3):
        rel = compute_transition(PLMap.identity(unit), cover3)
        assert rel.successors == cover3.closure_meets

    def test_constant_map(self, unit, cover3):
        c = PLMap.constant(unit, unit.point(0, Q("1/2")))
        rel = compute_transition(c, cover3)
        assert all(s == frozenset({1}) for s in rel.successors)

    @pytest.mark.parametrize("name", ["tent", "doubling", "yfold"])
    def test_no_false_negatives_against_grid(self, name):
        g, f = builtin_system(name)
        cover = build_taut_cover(g, f, Q("1/4"))
        rel = compute_transition(f, cover)
        res = 1 << 12
        fat = [fatten(c, max(g.lengths) / res * 2 * 8, closed=True) for c in cover.closures]
        for i, cl in enumerate(cover.closures):
            img = image_region(f, cl)
            for e, L in enumerate(g.lengths):
                for lo, hi, _, _ in cl.intervals(e):
                    for t in range(9):
                        p = g.point(e, lo + (hi - lo) * t / 8)
                        fp = f(p)
                        assert img.contains(fp)
                        hits = {j for j, c in enumerate(cover.closures) if c.contains(fp)}
                        assert hits <= rel[i]
            # exact successors are confirmed by a fattened grid hit
            for j in rel[i]:
                assert fat[j].intersects(img)

    def test_mismatched_graphs(self, circle, tent_map):
        cover = build_taut_cover(circle, PLMap.identity(circle), Q("1/2"))
        with pytest.raises(InputError):
            compute_transition(tent_map, cover)


class TestPatterns:
    def test_self_loop(self):
        rel = TransitionRelation(2, (frozenset({0}), frozenset({0, 1})))
        assert list(enumerate_patterns(rel, 5, start=0)) == [(0,) * 5]

    def test_tent_from_middle(self, tent_map, cover3):
        rel = compute_transition(tent_map, cover3)
        assert list(enumerate_patterns(rel, 2, start=1)) == [(1, 1), (1, 2)]

    def test_complete_relation_count(self):
        rel = TransitionRelation.complete(3)
        walks = list(enumerate_patterns(rel, 4, budget=1000))
        assert len(walks) == count_walks(rel, 4) == 3 * 3 ** 3 == 81
        assert walks == sorted(walks)
        assert set(walks) == set(itertools.product(range(3), repeat=4))

    def test_budget_truncates(self):
        rel = TransitionRelation.complete(3)
        assert len(list(enumerate_patterns(rel, 4, budget=10))) == 10

    def test_walks_respect_relation(self, tent_map, cover3):
        rel = compute_transition(tent_map, cover3)
        walks = list(enumerate_patterns(rel, 5))
        assert len(walks) == count_walks(rel, 5)
        assert all(rel.is_walk(w) for w in walks)
        brute = [w for w in itertools.product(range(3), repeat=5) if rel.is_walk(w)]
        assert walks == brute

    def test_invalid_relation(self):
        with pytest.raises(InputError):
            TransitionRelation(2, (frozenset(), frozenset({0})))
        with pytest.raises(InputError):
            TransitionRelation(2, (frozenset({2}), frozenset({0})))

    def test_adjacency_text(self, tent_map, cover3):
        assert compute_transition(tent_map, cover3).adjacency_text() == "0: 0 1 2\n1: 1 2\n2: 0 1 2"
