import pytest

from graphshadow import (
    InputError,
    PLMap,
    Q,
    Retraction,
    compose,
    evaluate,
    image_region,
    inverse_modulus,
    is_surjective,
    lipschitz_modulus,
    preimage_region,
    sup_distance,
)
from graphshadow.pl_map import iterate
from graphshadow.systems import circle_doubling, interval_map


def T_exact(x):
    return 1 - abs(1 - 2 * x)


class TestEvaluate:
    def test_tent_value(self, unit, tent_map):
        assert evaluate(tent_map, unit.point(0, Q("3/4"))) == unit.point(0, Q("1/2"))

    def test_tent_matches_formula(self, unit, tent_map):
        for j in range(41):
            x = Q(j) / 40
            assert evaluate(tent_map, unit.point(0, x)).offset == T_exact(x)

    def test_identity(self, ytree):
        ident = PLMap.identity(ytree)
        p = ytree.point(1, Q("2/7"))
        assert evaluate(ident, p) == p

    def test_circle_doubling(self, circle):
        _, D = circle_doubling(circle)
        # θ = 0.3 wraps to 0.6, which is 0.1 along edge 1
        assert evaluate(D, circle.point(0, Q("0.3"))) == circle.point(1, Q("0.1"))

    def test_iterate(self, unit, tent_map):
        orbit = iterate(tent_map, unit.point(0, Q("1/3")), 2)
        assert [p.offset for p in orbit] == [Q("1/3"), Q("2/3"), Q("2/3")]

    def test_discontinuous_pieces_rejected(self, unit):
        with pytest.raises(InputError):
            PLMap(unit, [[(0, Q("1/2"), 0, 0, Q("1/2")), (Q("1/2"), 1, 0, Q("1/4"), 1)]])


class TestImages:
    def test_tent_left(self, unit, tent_map):
        r = unit.interval(0, 0, Q("0.4"), True, True)
        assert image_region(tent_map, r) == unit.interval(0, 0, Q("0.8"), True, True)

    def test_tent_across_peak(self, unit, tent_map):
        r = unit.interval(0, Q("0.3"), Q("0.7"), True, True)
        assert image_region(tent_map, r) == unit.interval(0, Q("0.6"), 1, True, True)

    def test_identity_image(self, unit):
        r = unit.interval(0, Q("0.1"), Q("0.2"))
        assert image_region(PLMap.identity(unit), r) == r

    def test_preimage_two_branches(self, unit, tent_map):
        r = unit.interval(0, Q("0.6"), 1, True, True)
        assert preimage_region(tent_map, r) == unit.interval(0, Q("0.3"), Q("0.7"), True, True)

    def test_preimage_of_peak(self, unit, tent_map):
        assert preimage_region(tent_map, unit.point_region(unit.point(0, 1))) == unit.point_region(
            unit.point(0, Q("1/2"))
        )

    def test_identity_preimage(self, circle):
        r = circle.interval(1, Q("0.1"), Q("0.2"), True, False)
        assert preimage_region(PLMap.identity(circle), r) == r


class TestDistances:
    def test_self_distance(self, tent_map):
        assert sup_distance(tent_map, tent_map) == 0

    def test_tent_vs_identity(self, unit, tent_map):
        # |T(x) - x| on each branch is affine, so the max is at a cell end
        cells = [Q(0), Q("1/2"), Q(1)]
        brute = max(abs(T_exact(x) - x) for x in cells)
        assert sup_distance(tent_map, PLMap.identity(unit)) == brute == 1

    def test_identity_vs_constant(self, unit):
        zero = PLMap.constant(unit, unit.point(0, 0))
        assert sup_distance(PLMap.identity(unit), zero) == 1

    def test_mismatched_graphs(self, unit, circle):
        with pytest.raises(InputError):
            sup_distance(PLMap.identity(unit), PLMap.identity(circle))


class TestModuli:
    def test_lipschitz(self, unit, tent_map):
        assert lipschitz_modulus(tent_map) == 2
        assert lipschitz_modulus(PLMap.identity(unit)) == 1

    def test_inverse_modulus(self, tent_map):
        assert inverse_modulus(tent_map, Q("1/10")) == Q("1/20")

    def test_surjectivity(self, unit, tent_map):
        assert is_surjective(tent_map)
        assert not is_surjective(PLMap.constant(unit, unit.point(0, Q("1/3"))))
        half = interval_map(unit, [(0, 0), (1, Q("1/2"))])
        assert not is_surjective(half)
        assert image_region(half, unit.full_region()) == unit.interval(0, 0, Q("1/2"), True, True)


class TestComposition:
    def test_tent_squared(self, unit, tent_map):
        T2 = compose(tent_map, tent_map)
        for j in range(33):
            x = Q(j) / 32
            assert evaluate(T2, unit.point(0, x)).offset == T_exact(T_exact(x))

    def test_identity_retraction(self, circle):
        r = Retraction.identity(circle)
        assert r.is_identity

    def test_nontrivial_retraction(self, unit):
        # squash [0, 1/10] onto the point 1/10
        pi = PLMap(unit, [[(0, Q("1/10"), 0, Q("1/10"), Q("1/10")), (Q("1/10"), 1, 0, Q("1/10"), 1)]])
        G = unit.interval(0, Q("1/10"), 1, True, True)
        r = Retraction(pi, G, Q("1/5"))
        assert not r.is_identity
        with pytest.raises(InputError):
            Retraction(pi, G, Q("1/20"))
