import random

import pytest

from graphshadow import (
    PLMap,
    PreconditionError,
    Q,
    Retraction,
    TautCover,
    build_skeleton,
    certify_perturbation,
    compute_gamma,
    compute_lambda,
    compute_transition,
    enumerate_patterns,
    evaluate,
    extend_surjective,
    image_region,
    is_surjective,
    lipschitz_modulus,
    realize_pattern,
    select_eta_lambda,
    sup_distance,
    verify_ball,
)
from graphshadow.genericity import bump_map, sample_perturbation
from graphshadow.metric_graph import region_distance
from graphshadow.pl_map import compose
from graphshadow.systems import builtin_system, circle_graph, interval_graph


@pytest.fixture(scope="module")
def tent_skeleton():
    g = interval_graph()
    from conftest import three_cover
    from graphshadow.systems import tent

    _, T = tent(g)
    cover = three_cover(g)
    G, sc = build_skeleton(T, cover, 1)
    return T, cover, G, sc


@pytest.fixture(scope="module")
def tent_cert():
    _, T = builtin_system("tent")
    return certify_perturbation(T, Q("2/5"), 2)


class TestLambda:
    def test_tent(self, tent_map):
        # mod(T, 1/2) = 1/4 and the cap 15/32 is larger
        assert compute_lambda(tent_map, 1) == Q("1/4")

    def test_identity_is_strictly_below_half_eps(self, unit):
        lam = compute_lambda(PLMap.identity(unit), Q("1/2"))
        assert lam == Q("15/64") and lam < Q("1/4")

    def test_constant(self, unit):
        c = PLMap.constant(unit, unit.point(0, Q("1/3")))
        assert compute_lambda(c, Q("2/7")) == Q("2/7") * 15 / 32

    def test_modulus_property(self):
        _, f = builtin_system("logistic")
        eps = Q("1/3")
        lam = compute_lambda(f, eps)
        assert lam * lipschitz_modulus(f) <= eps / 2 and lam < eps / 2


class TestEtaLambda:
    def test_tent_three_cover(self, tent_map, cover3):
        eta, lam = select_eta_lambda(tent_map, cover3, 1)
        assert eta < Q("1/5") and eta > lam > 0
        assert eta == Q("1/20")

    def test_identity_three_cover(self, unit, cover3):
        eta, lam = select_eta_lambda(PLMap.identity(unit), cover3, 1)
        # separation of cl U_0 and cl U_2 is 1/5
        assert region_distance(cover3.closures[0], cover3.closures[2]) == Q("1/5")
        assert eta < Q("1/5") and eta > lam

    def test_single_member(self, circle):
        c = TautCover(circle, [circle.full_region()])
        eta, lam = select_eta_lambda(PLMap.identity(circle), c, Q("1/2"))
        assert eta == Q("1/10")


class TestSkeleton:
    def test_block_count(self, tent_skeleton):
        _, cover, _, sc = tent_skeleton
        for arc in sc.arcs:
            assert arc.blocks == cover.k
            assert len(arc.points) == 2 * cover.k + 2
            assert all(a < b for a, b in zip(arc.points, arc.points[1:]))

    def test_distance_and_containment(self, tent_skeleton):
        T, cover, G, sc = tent_skeleton
        assert sup_distance(G, T) < 1
        phi_g = compute_transition(G, cover)
        assert phi_g.contains(compute_transition(T, cover))
        assert phi_g == sc.phi

    def test_arcs_in_core_sets(self, tent_skeleton):
        from graphshadow import core_set

        _, cover, _, sc = tent_skeleton
        g = cover.graph
        for i, arc in enumerate(sc.arcs):
            assert arc.region(g).issubset(core_set(cover, i, sc.eta))

    def test_endpoints_follow_f(self, tent_skeleton):
        T, cover, G, sc = tent_skeleton
        g = cover.graph
        for arc in sc.arcs:
            for t in (arc.start, arc.end):
                assert evaluate(G, g.point(arc.edge, t)) == evaluate(T, g.point(arc.edge, t))

    def test_blocks_map_onto_arcs(self, tent_skeleton):
        _, cover, G, sc = tent_skeleton
        g = cover.graph
        for i, arc in enumerate(sc.arcs):
            for j in sc.phi[i]:
                a, b = arc.block(j)
                img = image_region(G, g.interval(arc.edge, a, b, True, True))
                assert img == sc.arcs[j].region(g)

    def test_spans(self, tent_skeleton):
        _, cover, _, sc = tent_skeleton
        for i, span in enumerate(sc.spans):
            assert span.is_connected
            meets = {j for j in range(cover.k) if span.intersects(cover.members[j])}
            assert meets == set(sc.phi[i])

    def test_all_length_six_walks_realized(self, tent_skeleton):
        _, cover, G, sc = tent_skeleton
        for pat in enumerate_patterns(sc.phi, 6):
            res = realize_pattern(G, cover, pat)
            assert res.realized
            p = res.witness
            for j in pat:
                assert cover.closures[j].contains(p)
                p = evaluate(G, p)

    def test_with_retraction(self, unit, tent_map, cover3):
        # squash [0, s] onto s for a tiny s
        s = Q("1/200")
        pi = PLMap(unit, [[(0, s, 0, s, s), (s, 1, 0, s, 1)]])
        r = Retraction(pi, unit.interval(0, s, 1, True, True), 2 * s)
        G, sc = build_skeleton(tent_map, cover3, 1, retraction=r)
        assert sc.phi.contains(compute_transition(tent_map, cover3))
        assert image_region(G, unit.full_region()).issubset(r.subgraph)
        for pat in enumerate_patterns(sc.phi, 4):
            assert realize_pattern(G, cover3, pat).realized

    def test_retraction_too_far(self, unit, tent_map, cover3):
        s = Q("1/4")
        pi = PLMap(unit, [[(0, s, 0, s, s), (s, 1, 0, s, 1)]])
        r = Retraction(pi, unit.interval(0, s, 1, True, True), 2 * s)
        with pytest.raises(PreconditionError):
            build_skeleton(tent_map, cover3, 1, retraction=r)


class TestSurjective:
    def test_tent_three_cover(self, tent_skeleton):
        T, cover, _, sc = tent_skeleton
        G, ss = extend_surjective(T, cover, sc, 1)
        assert is_surjective(G)
        g = cover.graph
        for arc in ss.arcs:
            assert arc.blocks == cover.k + ss.m
        assert set().union(*ss.psi) == set(range(ss.m))
        # a block assigned to piece j is mapped onto P_j exactly
        for i, arc in enumerate(ss.arcs):
            for j in ss.psi[i]:
                a, b = arc.block(cover.k + j)
                assert image_region(G, g.interval(arc.edge, a, b, True, True)) == ss.pieces[j]
        assert compute_transition(G, cover) == ss.base.phi

    def test_needs_surjective_map(self, unit, cover3, tent_skeleton):
        _, _, _, sc = tent_skeleton
        c = PLMap.constant(unit, unit.point(0, Q("1/2")))
        with pytest.raises(PreconditionError):
            extend_surjective(c, cover3, sc, 1)


class TestGamma:
    def test_margins(self, tent_skeleton):
        _, cover, G, sc = tent_skeleton
        gamma, tau, xi = compute_gamma(G, sc)
        assert 0 < gamma < min(tau, sc.eta, xi)
        assert gamma <= xi / lipschitz_modulus(G)
        # tau against an uncapped brute-force over all non-successors
        brute = min(
            region_distance(image_region(G, cover.closures[i]), cover.closures[j])
            for i in range(cover.k)
            for j in range(cover.k)
            if j not in sc.phi[i]
        )
        assert tau == min(brute, sc.eta)


class TestCertify:
    def test_tent(self, tent_cert):
        _, T = builtin_system("tent")
        assert tent_cert.problems() == []
        assert sup_distance(tent_cert.g, tent_cert.source) < Q("2/5")

    def test_eps_too_large(self, tent_map):
        with pytest.raises(PreconditionError):
            certify_perturbation(tent_map, Q("1/2"), 2)

    def test_identity_on_circle(self):
        g = circle_graph()
        ident = PLMap.identity(g)
        cert = certify_perturbation(ident, Q("3/10"), 3)
        assert sup_distance(cert.g, ident) > 0
        assert cert.problems() == []

    def test_surjective_mode(self):
        _, D = builtin_system("doubling")
        cert = certify_perturbation(D, Q("1/4"), 2, surjective=True)
        assert is_surjective(cert.g) and cert.surjective


class TestVerifyBall:
    def test_centre(self, tent_cert):
        rep = verify_ball(tent_cert, samples=1, orbits=3, length=40, seed=3)
        assert rep.verified and rep.kinds == {"centre": 1}

    def test_half_gamma_bump_keeps_relation(self, tent_cert):
        g = tent_cert.g.graph
        arc_pt = tent_cert.anchors[2]
        P = bump_map(g, [(0, arc_pt.offset, Q("1/1000"), tent_cert.gamma / 2)])
        h = compose(P, tent_cert.g)
        assert sup_distance(h, tent_cert.g) < tent_cert.gamma
        assert compute_transition(h, tent_cert.cover) == tent_cert.phi

    @pytest.mark.parametrize("kind", ["outer", "inner", "edge", "anchor"])
    def test_samplers_stay_in_ball(self, tent_cert, kind):
        rng = random.Random(kind)
        for _ in range(3):
            h, _ = sample_perturbation(tent_cert, rng, kind)
            assert 0 <= sup_distance(h, tent_cert.g) < tent_cert.gamma

    def test_small_run_and_determinism(self, tent_cert):
        a = verify_ball(tent_cert, samples=4, orbits=3, length=30, seed=9)
        b = verify_ball(tent_cert, samples=4, orbits=3, length=30, seed=9)
        assert a.verified and a.lines() == b.lines()
