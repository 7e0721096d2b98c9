"""Skeleton perturbations with certified shadowing radii, and their empirical verification.

Given a PL map ``f``, a tolerance ``eps`` and ``n`` with ``eps < 1/n``, the
pipeline builds a taut cover, chooses margins ``eta > lambda``, places a
subdivided arc ``I_i`` in each member's core set and replaces ``f`` on the arcs
by maps whose blocks run linearly across the arcs ``I_j`` for every successor
``j``.  The result ``g`` realizes every cover pattern, and so does every map
within ``gamma`` of it; such maps then ``1/n``-shadow their pseudo-orbits.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import ceil
import random

from .cover import build_taut_cover, core_sets, lebesgue_number
from .errors import CertificateError, ConstructionError, InputError, PreconditionError
from .metric_graph import ball, fatten, region_diameter, region_distance, region_path
from .pl_map import (
    PLMap,
    Retraction,
    _walk_pieces,
    compose,
    evaluate,
    image_region,
    inverse_modulus,
    is_surjective,
    lipschitz_modulus,
    sup_distance,
)
from .rational import Q, fmt, mpq
from .shadowing import PseudoOrbit, check_shadowing, generate_pseudo_orbit
from .symbolic import compute_transition

__all__ = [
    "Arc",
    "PerturbationScaffold",
    "SurjectiveScaffold",
    "ShadowingCertificate",
    "VerificationReport",
    "compute_lambda",
    "select_eta_lambda",
    "build_skeleton",
    "extend_surjective",
    "compute_gamma",
    "certify_perturbation",
    "bump_map",
    "sample_perturbation",
    "verify_ball",
]

_ZERO = mpq(0)
_MAX_HALVINGS = 64


@dataclass(frozen=True)
class Arc:
    """Subdivided arc on the interior of one edge.

    ``points`` are ``b_0 < a_1 < b_1 < ... < a_K < b_K < a_{K+1}``; block
    ``j`` (0-based) is ``[points[2j+1], points[2j+2]]``.  ``margin`` is the
    gap kept to the boundary of the core set the arc was cut from.
    """

    edge: int
    points: tuple
    margin: object

    @property
    def blocks(self):
        return (len(self.points) - 2) // 2

    @property
    def start(self):
        return self.points[0]

    @property
    def end(self):
        return self.points[-1]

    def block(self, j):
        return self.points[2 * j + 1], self.points[2 * j + 2]

    @property
    def spacing(self):
        return self.points[1] - self.points[0]

    def region(self, graph):
        return graph.interval(self.edge, self.start, self.end, True, True)


@dataclass
class PerturbationScaffold:
    """Data of a skeleton construction: margins, arcs, connector regions and ``φ``."""

    eta: object
    lam: object
    cover: object
    retraction: object
    arcs: tuple
    regions: tuple
    spans: tuple
    phi: object
    source_phi: object
    log: list = field(default_factory=list)

    @property
    def k(self):
        return self.cover.k


@dataclass
class SurjectiveScaffold:
    """Peano pieces ``P_j`` (closed edge intervals), the relation ``ψ`` and the extended arcs."""

    pieces: tuple
    psi: tuple
    arcs: tuple
    base: PerturbationScaffold

    @property
    def m(self):
        return len(self.pieces)


def compute_lambda(f, eps):
    """Margin ``λ`` with ``d(x, y) < λ ⇒ d(f(x), f(y)) < eps/2`` and ``λ < eps/2``.

    ``λ = min(mod(f, eps/2), 15·eps/32)``; the second term keeps ``λ`` strictly
    below ``eps/2`` and is the value returned for constant maps.
    """
    eps = Q(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    cap = eps * 15 / 32
    m = inverse_modulus(f, eps / 2)
    return cap if m is None else min(m, cap)


def _separation(f, cover, phi, cap):
    """``min(cap, min_i min_{j ∉ φ(i)} d(f(cl U_i), cl U_j))``, exact.

    Only members whose closures come within ``cap`` of the image are measured.
    """
    best = cap
    for i in range(cover.k):
        img = image_region(f, cover.closures[i])
        near = fatten(img, cap, closed=True)
        for j in cover.candidates(near):
            if j in phi[i] or not near.intersects(cover.closures[j], closure=True):
                continue
            d = region_distance(img, cover.closures[j])
            if d < best:
                best = d
    return best


def _longest_interval(region):
    """Longest open interval of ``region`` on a single edge (lowest edge on ties)."""
    best = None
    for e in region.edge_ids():
        for lo, hi, _, _ in region.intervals(e):
            if best is None or hi - lo > best[2] - best[1]:
                best = (e, lo, hi)
    return best


def select_eta_lambda(f, cover, eps):
    """Exact ``(η, λ)`` with ``η > λ > 0`` meeting the skeleton conditions.

    Starting from ``eps/5`` and halving, ``η`` must make every core set
    contain a nondegenerate arc, keep disjoint members more than ``η`` apart,
    and keep ``f(cl U_i)`` more than ``η`` from ``cl U_j`` for ``j ∉ φ_f(i)``.
    ``λ = compute_lambda(f, η)``.
    """
    eps = Q(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    phi = compute_transition(f, cover)
    dist = cover.closure_distances
    disjoint = None
    for i in range(cover.k):
        for j in range(i + 1, cover.k):
            if not cover.members[i].intersects(cover.members[j]):
                d = dist[i][j]
                disjoint = d if disjoint is None or d < disjoint else disjoint
    eta = eps / 5
    sep = _separation(f, cover, phi.successors, 2 * eta)
    reason = None
    for _ in range(_MAX_HALVINGS):
        if disjoint is not None and not disjoint > eta:
            reason = f"disjoint members only {fmt(disjoint)} apart"
        elif not sep > eta:
            reason = f"image separation only {fmt(sep)}"
        else:
            cores = core_sets(cover, eta)
            bad = [i for i, c in enumerate(cores) if _longest_interval(c) is None]
            if not bad:
                return eta, compute_lambda(f, eta)
            reason = f"core set {bad[0]} has no arc"
        eta = eta / 2
    raise ConstructionError(f"no admissible eta after {_MAX_HALVINGS} halvings: {reason}", stage="eta")


def _place_arc(core, blocks, within=None):
    region = core if within is None else core.intersection(within)
    best = _longest_interval(region)
    if best is None:
        return None
    e, lo, hi = best
    margin = (hi - lo) / 4
    lo, hi = lo + margin, hi - margin
    parts = 2 * blocks + 1
    pts = tuple(lo + (hi - lo) * t / parts for t in range(parts + 1))
    return Arc(e, pts, margin)


def _clip_cells(f, e, a, b):
    """Cells of ``f`` on edge ``e`` restricted to ``[a, b]``."""
    out = []
    for x0, x1, te, t0, t1 in f.cells(e):
        lo, hi = max(a, x0), min(b, x1)
        if lo >= hi:
            continue
        slope = (t1 - t0) / (x1 - x0)
        out.append((lo, hi, te, t0 + slope * (lo - x0), t0 + slope * (hi - x0)))
    return out


def _splice(f, replacements):
    """``f`` with its values on each ``[lo, hi]`` of ``replacements[e]`` replaced."""
    g = f.graph
    pieces = []
    for e, L in enumerate(g.lengths):
        plist = []
        cursor = _ZERO
        for lo, hi, cells in sorted(replacements.get(e, []), key=lambda r: r[0]):
            plist.extend(_clip_cells(f, e, cursor, lo))
            plist.extend(cells)
            cursor = hi
        plist.extend(_clip_cells(f, e, cursor, L))
        pieces.append(plist)
    return PLMap(g, pieces)


def _arc_cells(graph, arc, start, finish, targets, region, label):
    """Cells of the arc map: connectors inside ``region`` joining the used blocks.

    ``targets`` lists ``(block position, legs)``; each block is traversed along
    its legs at constant speed.
    """
    cells = []
    x, here = arc.start, start
    plan = sorted(targets, key=lambda t: t[0]) + [(None, None)]
    for pos, legs in plan:
        if pos is None:
            xa, goal = arc.end, finish
        else:
            xa = arc.block(pos)[0]
            e0, s0, _ = legs[0]
            goal = graph.point(e0, s0)
        path = region_path(region, here, goal)
        if path is None:
            raise ConstructionError(f"no connector path inside the allowed region for {label}",
                                    stage="skeleton")
        cells.extend(_walk_pieces(graph, x, xa, path or [(here.edge, here.offset, here.offset)]))
        if pos is None:
            break
        xb = arc.block(pos)[1]
        cells.extend(_walk_pieces(graph, xa, xb, legs))
        e1, _, s1 = legs[-1]
        x, here = xb, graph.point(e1, s1)
    return cells


def _allowed_region(cover, succ, avoid=_ZERO):
    """``⋃_{j∈φ(i)} U_j ∖ ⋃_{l∉φ(i)} cl U_l`` (fattened by ``avoid`` when positive)."""
    inside = cover.union(sorted(succ))
    near = set()
    for j in succ:
        near |= cover.closure_meets[j]
    if avoid > 0:
        near = set(cover.candidates(fatten(inside, avoid, closed=True)))
    bad = [cover.closures[l] for l in sorted(near - set(succ))]
    if avoid > 0:
        bad = [fatten(c, avoid, closed=True) for c in bad]
    if bad:
        inside = inside.difference(bad[0].union(*bad[1:]))
    return inside


def _component_of(region, p):
    for comp in region.components():
        if comp.contains(p):
            return comp
    return region.graph.empty_region()


def build_skeleton(f, cover, eps, eta=None, lam=None, retraction=None, extra_blocks=0):
    """Skeleton map ``g`` with ``ρ(g, f) < eps`` and ``φ_{U,g} ⊇ φ_{U,f}``.

    Parameters
    ----------
    f : PLMap
    cover : TautCover
    eps : rational
    eta, lam : rationals, optional
        Margins; chosen by :func:`select_eta_lambda` when omitted.
    retraction : Retraction, optional
        Retraction onto a subgraph with ``ρ(π, id) < λ``; identity by default.
        With a retraction the result is ``π ∘ ĝ ∘ π``.
    extra_blocks : int
        Additional blocks reserved after the ``k`` cover blocks (used by
        :func:`extend_surjective`).

    Returns
    -------
    (PLMap, PerturbationScaffold)
    """
    g_ = cover.graph
    eps = Q(eps)
    if eta is None or lam is None:
        eta, lam = select_eta_lambda(f, cover, eps)
    eta, lam = Q(eta), Q(lam)
    if not eta > lam > 0:
        raise InputError("need eta > lambda > 0")
    if retraction is None:
        retraction = Retraction.identity(g_)
    identity = retraction.is_identity
    if not identity and not sup_distance(retraction.map, PLMap.identity(g_)) < lam:
        raise PreconditionError("retraction moves points by lambda or more")
    log = [f"eta={fmt(eta)} lambda={fmt(lam)} k={cover.k}"]
    source_phi = compute_transition(f, cover)
    succ = source_phi.successors
    cores = core_sets(cover, eta)
    within = None if identity else retraction.subgraph.interior()
    blocks = cover.k + extra_blocks
    arcs = []
    for i, core in enumerate(cores):
        arc = _place_arc(core, blocks, within)
        if arc is None:
            raise ConstructionError(f"core set {i} contains no arc", stage="skeleton")
        arcs.append(arc)
    avoid = _ZERO if identity else lam
    regions = tuple(_allowed_region(cover, succ[i], avoid) for i in range(cover.k))
    spans = []
    for i, arc in enumerate(arcs):
        start = evaluate(f, g_.point(arc.edge, arc.start))
        spans.append(_component_of(regions[i], start))
    scaffold = PerturbationScaffold(eta, lam, cover, retraction, tuple(arcs), regions, tuple(spans),
                                    source_phi, source_phi, log)
    g = _assemble(f, scaffold, {})
    if not identity:
        g = compose(retraction.map, compose(g, retraction.map))
    scaffold.phi = compute_transition(g, cover)
    if not scaffold.phi.contains(source_phi):
        raise ConstructionError("skeleton lost a transition", stage="skeleton")
    log.append(f"skeleton: {g.segment_count()} segments")
    return g, scaffold


def _cover_legs(graph, arc):
    return [(arc.edge, arc.start, arc.end)]


def _assemble(f, scaffold, extra_targets):
    """Splice the arc maps into ``f``; ``extra_targets[i]`` adds ``(position, legs)`` pairs."""
    graph = scaffold.cover.graph
    repl = {}
    for i, arc in enumerate(scaffold.arcs):
        start = evaluate(f, graph.point(arc.edge, arc.start))
        finish = evaluate(f, graph.point(arc.edge, arc.end))
        targets = [(j, _cover_legs(graph, scaffold.arcs[j])) for j in sorted(scaffold.source_phi[i])]
        targets += extra_targets.get(i, [])
        cells = _arc_cells(graph, arc, start, finish, targets, scaffold.regions[i], f"member {i}")
        repl.setdefault(arc.edge, []).append((arc.start, arc.end, cells))
    return _splice(f, repl)


def _peano_pieces(cover, size):
    """Closed edge pieces of an equal subdivision, each inside one member, diameter < ``size``."""
    g = cover.graph
    for _ in range(_MAX_HALVINGS):
        pieces = []
        ok = True
        for e, L in enumerate(g.lengths):
            parts = max(1, ceil(L / size) + 1)
            while not L / parts < size:
                parts += 1
            for t in range(parts):
                piece = g.interval(e, L * t / parts, L * (t + 1) / parts, True, True)
                if not any(piece.issubset(cover.members[j]) for j in cover.candidates(piece)):
                    ok = False
                    break
                pieces.append((e, L * t / parts, L * (t + 1) / parts, piece))
            if not ok:
                break
        if ok:
            return pieces
        size = size / 2
    raise ConstructionError("Peano pieces do not fit inside members", stage="surjective")


def extend_surjective(f, cover, scaffold, eps):
    """Surjective skeleton: every arc also runs across the Peano pieces ``P_j``, ``j ∈ ψ(i)``.

    The pieces are closed intervals of an equal edge subdivision, each inside a
    member and of diameter below ``min(eps/5, η)``; ``ψ(i)`` collects the pieces
    meeting ``f(U_i)``.  Arcs are rebuilt with ``k + m`` blocks.

    Returns
    -------
    (PLMap, SurjectiveScaffold)
    """
    if not is_surjective(f):
        raise PreconditionError("surjective mode needs a surjective map")
    graph = cover.graph
    eps = Q(eps)
    raw = _peano_pieces(cover, min(eps / 5, scaffold.eta))
    m = len(raw)
    g, base = build_skeleton(f, cover, eps, scaffold.eta, scaffold.lam, scaffold.retraction, extra_blocks=m)
    images = [image_region(f, u) for u in cover.members]
    psi = []
    extra = {}
    for i in range(cover.k):
        chosen = [j for j, (_, _, _, piece) in enumerate(raw) if piece.intersects(images[i])]
        for j in chosen:
            if not raw[j][3].issubset(base.regions[i]):
                raise ConstructionError(f"piece {j} leaves the allowed region of member {i}",
                                        stage="surjective")
        psi.append(frozenset(chosen))
        extra[i] = [(cover.k + j, [(raw[j][0], raw[j][1], raw[j][2])]) for j in chosen]
    if set().union(*psi) != set(range(m)):
        raise ConstructionError("some Peano piece is in no ψ(i)", stage="surjective")
    g = _assemble(f, base, extra)
    if not base.retraction.is_identity:
        g = compose(base.retraction.map, compose(g, base.retraction.map))
    base.phi = compute_transition(g, cover)
    if not base.phi.contains(base.source_phi):
        raise ConstructionError("surjective skeleton lost a transition", stage="surjective")
    if not is_surjective(g):
        raise ConstructionError("extended map is not surjective", stage="surjective")
    base.log.append(f"surjective: m={m} pieces, {g.segment_count()} segments")
    pieces = tuple(piece for _, _, _, piece in raw)
    return g, SurjectiveScaffold(pieces, tuple(psi), base.arcs, base)


def compute_gamma(g, scaffold):
    """Certified radius ``γ`` with its margins ``τ`` and ``ξ``.

    ``τ`` is the least distance from ``g(cl U_i)`` to a ``cl U_j`` with
    ``j ∉ φ_g(i)`` (capped at ``η``), ``ξ`` is half the smallest block spacing
    or arc margin, and ``γ`` is half of ``min(τ, η, ξ, ξ/Lip π, ξ/Lip g)``.

    Returns
    -------
    (gamma, tau, xi)
    """
    base = scaffold.base if isinstance(scaffold, SurjectiveScaffold) else scaffold
    cover = base.cover
    phi = compute_transition(g, cover)
    if phi != base.phi:
        raise CertificateError("scaffold relation does not match the map", stage="gamma")
    tau = _separation(g, cover, phi.successors, base.eta)
    xi = min(min(a.spacing, a.margin) for a in base.arcs) / 2
    lip_pi = max(mpq(1), lipschitz_modulus(base.retraction.map))
    lip_g = max(mpq(1), lipschitz_modulus(g))
    bound = min(tau, base.eta, xi, xi / lip_pi, xi / lip_g)
    if not bound > 0:
        raise CertificateError("degenerate margin (zero)", stage="gamma")
    gamma = bound / 2
    return gamma, tau, xi


@dataclass
class ShadowingCertificate:
    """Claim that every map within ``gamma`` of ``g`` ``1/n``-shadows its ``delta``-pseudo-orbits."""

    eps: object
    n: int
    cover: object
    source: object
    g: object
    gamma: object
    delta: object
    tau: object
    xi: object
    eta: object
    lam: object
    phi: object
    anchors: tuple = ()
    seed: int = 0
    surjective: bool = False
    log: list = field(default_factory=list)
    scaffold: object = field(default=None, repr=False, compare=False)

    def problems(self):
        """Violated certificate invariants (empty when consistent)."""
        out = []
        if not (self.gamma < self.tau and self.gamma < self.eta and self.gamma < self.xi):
            out.append("gamma not below tau, eta and xi")
        if self.delta != lebesgue_number(self.cover):
            out.append("delta differs from the Lebesgue number")
        if not sup_distance(self.g, self.source) < self.eps:
            out.append("g is not within eps of the source map")
        if compute_transition(self.g, self.cover) != self.phi:
            out.append("stored relation differs from the map's")
        return out


def _diameter_chain(cover, phi, eps):
    for i in range(cover.k):
        d = region_diameter(cover.graph, cover.union(sorted(phi[i])))
        if not d < eps:
            return i, d
    return None


def certify_perturbation(f, eps, n, surjective=False, seed=0, cover=None, retraction=None):
    """Run cover → margins → skeleton → γ and return a :class:`ShadowingCertificate`.

    Requires ``0 < eps < 1/n``.  All recorded claims are checked exactly before
    returning; failures raise errors labelled with the pipeline stage.
    """
    eps = Q(eps)
    n = int(n)
    if n < 1 or not 0 < eps < mpq(1, n):
        raise PreconditionError("need 0 < eps < 1/n")
    graph = f.graph
    log = [f"eps={fmt(eps)} n={n} surjective={surjective}"]
    if cover is None:
        cover = build_taut_cover(graph, f, eps)
    elif not cover.is_valid_for(f, eps):
        raise ConstructionError("cover diameters are not below eps/5", stage="cover")
    log.append(f"cover: k={cover.k}")
    eta, lam = select_eta_lambda(f, cover, eps)
    g, scaffold = build_skeleton(f, cover, eps, eta, lam, retraction)
    if surjective:
        g, scaffold = extend_surjective(f, cover, scaffold, eps)
    base = scaffold.base if surjective else scaffold
    log.extend(base.log)
    gamma, tau, xi = compute_gamma(g, scaffold)
    delta = lebesgue_number(cover)
    log.append(f"gamma={fmt(gamma)} tau={fmt(tau)} xi={fmt(xi)} delta={fmt(delta)}")
    if not sup_distance(g, f) < eps:
        raise CertificateError("g is not within eps of f", stage="certify")
    bad = _diameter_chain(cover, base.phi, eps)
    if bad is not None:
        raise CertificateError(f"successor union of member {bad[0]} has diameter {fmt(bad[1])}",
                               stage="certify")
    if surjective and not is_surjective(g):
        raise CertificateError("g is not surjective", stage="certify")
    anchors = []
    for arc in base.arcs:
        anchors.append(graph.point(arc.edge, arc.start))
        anchors.append(graph.point(arc.edge, arc.end))
    return ShadowingCertificate(eps, n, cover, f, g, gamma, delta, tau, xi, eta, lam, base.phi,
                                tuple(anchors), seed, surjective, log, scaffold)


# ---------------------------------------------------------------------------
# Perturbations and ball verification
# ---------------------------------------------------------------------------


def bump_map(graph, bumps):
    """Near-identity PL map moving each ``(edge, centre, half_width, shift)`` bump's peak by ``shift``.

    Outside the bumps (and at every vertex) the map is the identity; the
    displacement is at most ``max |shift|``.
    """
    by_edge = {}
    for e, c, w, a in bumps:
        by_edge.setdefault(e, []).append((Q(c), Q(w), Q(a)))
    pieces = []
    for e, L in enumerate(graph.lengths):
        plist = []
        cursor = _ZERO
        for c, w, a in sorted(by_edge.get(e, [])):
            lo, hi = max(c - w, cursor), min(c + w, L)
            if not lo < c < hi or not 0 <= c + a <= L or lo <= 0 or hi >= L:
                continue
            if cursor < lo:
                plist.append((cursor, lo, e, cursor, lo))
            plist.append((lo, c, e, lo, c + a))
            plist.append((c, hi, e, c + a, hi))
            cursor = hi
        if cursor < L:
            plist.append((cursor, L, e, cursor, L))
        pieces.append(plist)
    return PLMap(graph, pieces)


def _random_bumps(graph, rng, amplitude, count, centres=None):
    out = []
    for t in range(count):
        if centres:
            p = centres[rng.randrange(len(centres))]
            e, c = p.edge, p.offset
        else:
            e = rng.randrange(len(graph.edges))
            c = graph.lengths[e] * mpq(rng.randrange(1, 1 << 12), 1 << 12)
        L = graph.lengths[e]
        room = min(c, L - c)
        if room <= 0:
            continue
        w = room * mpq(rng.randrange(1, 1 << 8), 1 << 9)
        a = amplitude * mpq(rng.randrange(1, 1 << 8), 1 << 8) * rng.choice((-1, 1))
        if not 0 <= c + a <= L:
            a = -a
        out.append((e, c, w, a))
    return out


def sample_perturbation(cert, rng, kind=None):
    """A PL map ``h`` with ``ρ(h, g) < γ`` (checked exactly), and a short description.

    Kinds: ``outer`` (``P ∘ g``), ``inner`` (``g ∘ P``), ``edge`` (bumps at
    ``g`` of the arc endpoints, amplitude close to ``γ``) and ``anchor``
    (bumps at the arc endpoints themselves).  ``P`` is a bump map.
    """
    g = cert.g
    graph = g.graph
    kind = kind or rng.choice(("outer", "inner", "edge", "anchor"))
    lip = max(mpq(1), lipschitz_modulus(g))
    gamma = cert.gamma
    for _ in range(_MAX_HALVINGS):
        count = rng.randrange(1, 4)
        if kind == "outer":
            h = compose(bump_map(graph, _random_bumps(graph, rng, gamma, count)), g)
        elif kind == "inner":
            h = compose(g, bump_map(graph, _random_bumps(graph, rng, gamma / lip, count)))
        elif kind == "edge":
            centres = [evaluate(g, p) for p in cert.anchors] or None
            bumps = [(e, c, w, a * 99 / 100 / abs(a) * gamma)
                     for e, c, w, a in _random_bumps(graph, rng, gamma, count, centres)]
            h = compose(bump_map(graph, bumps), g)
        elif kind == "anchor":
            bumps = [(e, c, w, a * 99 / 100 / abs(a) * gamma / lip)
                     for e, c, w, a in _random_bumps(graph, rng, gamma, count, list(cert.anchors) or None)]
            h = compose(g, bump_map(graph, bumps))
        else:
            raise InputError(f"unknown perturbation kind {kind!r}")
        if sup_distance(h, g) < gamma:
            return h, kind
        gamma = gamma / 2
    raise ConstructionError("could not sample a perturbation inside the ball", stage="verify")


def _walk_orbit(h, cover, delta, length, rng):
    """Pseudo-orbit hopping to a random member near each image (adversarial pattern choice)."""
    graph = h.graph
    pts = [graph.full_region().random_point(rng)]
    for _ in range(length - 1):
        near = ball(graph, evaluate(h, pts[-1]), delta)
        options = [u for u in (cover.members[j].intersection(near) for j in cover.candidates(near))
                   if not u.is_empty()]
        pts.append(rng.choice(options).random_point(rng))
    return PseudoOrbit(tuple(pts), delta, h)


def _orbit(h, cert, strategy, length, rng):
    graph = h.graph
    if strategy == "walk":
        return _walk_orbit(h, cert.cover, cert.delta, length, rng)
    start = None
    if strategy == "drift":
        start = graph.full_region().random_point(rng)
    return generate_pseudo_orbit(h, cert.delta, length, strategy, seed=rng.randrange(1 << 30), start=start)


@dataclass(frozen=True)
class Failure:
    sample: int
    orbit: object
    kind: str
    replay: str
    detail: str


@dataclass
class VerificationReport:
    """Outcome of :func:`verify_ball`; ``verified`` iff no failures."""

    samples: int
    orbits: int
    length: int
    seed: int
    checked: int = 0
    failures: list = field(default_factory=list)
    kinds: dict = field(default_factory=dict)

    @property
    def verified(self):
        return not self.failures

    def lines(self):
        out = [
            f"verdict {'VERIFIED' if self.verified else 'REFUTED'}",
            f"seed {self.seed}",
            f"samples {self.samples} orbits {self.orbits} length {self.length}",
            f"checked {self.checked}",
            "perturbations " + " ".join(f"{k}={v}" for k, v in sorted(self.kinds.items())),
        ]
        for f in self.failures:
            out.append(f"failure sample={f.sample} orbit={f.orbit} kind={f.kind} replay={f.replay} {f.detail}")
        return out


_STRATEGIES = ("random", "drift", "walk")


def _run_sample(args):
    cert, s, orbits, length, seed = args
    replay = f"{seed}:{s}"
    rng = random.Random(replay)
    failures = []
    if s == 0:
        h, kind = cert.g, "centre"
    else:
        kind = ("outer", "inner", "edge", "anchor")[s % 4]
        h, kind = sample_perturbation(cert, rng, kind)
    phi = compute_transition(h, cert.cover)
    if phi != cert.phi:
        failures.append(Failure(s, None, "transition", replay, "relation of h differs from the certificate"))
    target = mpq(1, cert.n)
    hint = cert.eps / 5
    checked = 0
    for o in range(orbits):
        strategy = _STRATEGIES[o % len(_STRATEGIES)]
        po = _orbit(h, cert, strategy, length, rng)
        checked += 1
        if not check_shadowing(h, po, target, hint=hint).shadowed:
            failures.append(Failure(s, o, "shadowing", replay, f"{strategy} pseudo-orbit not 1/{cert.n}-shadowed"))
    return kind, checked, failures


def verify_ball(cert, samples=50, orbits=20, length=100, seed=0, workers=1):
    """Sample maps ``h`` in the ``γ``-ball of ``g`` and test the certificate's claims.

    Sample 0 is ``g`` itself; the rest cycle through the perturbation kinds of
    :func:`sample_perturbation`.  For each ``h`` the cover relation must equal
    the certificate's, and ``orbits`` ``δ``-pseudo-orbits (random, drift and
    random-walk strategies) must be ``1/n``-shadowed exactly.  Every failure
    carries the seed string that replays its sample.
    """
    report = VerificationReport(samples, orbits, length, seed)
    jobs = [(cert, s, orbits, length, seed) for s in range(samples)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_sample, jobs))
    else:
        results = [_run_sample(job) for job in jobs]
    for kind, checked, failures in results:
        report.kinds[kind] = report.kinds.get(kind, 0) + 1
        report.checked += checked
        report.failures.extend(failures)
    return report
