"""Pseudo-orbits, cover patterns, exact pattern realization and shadowing checks."""

from dataclasses import dataclass, field
import random

from .cover import lebesgue_number
from .errors import ConstructionError, InputError, PreconditionError
from .metric_graph import ball, fatten, graph_distance
from .pl_map import evaluate, image_region, lipschitz_modulus, preimage_region
from .rational import Q, mpq

__all__ = [
    "PseudoOrbit",
    "RealizationResult",
    "OracleVerdict",
    "ShadowingVerdict",
    "generate_pseudo_orbit",
    "assign_pattern",
    "realize_pattern",
    "grid_oracle",
    "check_shadowing",
]


@dataclass(frozen=True)
class PseudoOrbit:
    """Finite ``delta``-pseudo-orbit of ``map``; the gap condition is checked on creation."""

    points: tuple
    delta: object
    map: object = field(repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "delta", Q(self.delta))
        if self.delta <= 0:
            raise InputError("delta must be positive")
        if not self.points:
            raise InputError("a pseudo-orbit needs at least one point")
        g = self.map.graph
        for p in self.points:
            g.check_point(p)
        for i, gap in enumerate(self.gaps()):
            if not gap < self.delta:
                raise InputError(f"step {i} -> {i + 1} has gap {gap} >= delta")

    def gaps(self):
        """``d(x_{i+1}, f(x_i))`` for each consecutive pair."""
        f = self.map
        return [graph_distance(f.graph, b, evaluate(f, a)) for a, b in zip(self.points, self.points[1:])]

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class RealizationResult:
    """Outcome of :func:`realize_pattern`.

    ``trace[i]`` is the exact set of points at time ``i`` whose forward orbit
    follows the rest of the pattern; ``trace[0]`` is the realizing set.
    """

    realized: bool
    witness: object
    trace: tuple

    def __bool__(self):
        return self.realized


@dataclass(frozen=True)
class OracleVerdict:
    realized: bool
    witness: object
    widths: tuple

    def __bool__(self):
        return self.realized


@dataclass(frozen=True)
class ShadowingVerdict:
    shadowed: bool
    witness: object
    distances: tuple
    eps: object

    def __bool__(self):
        return self.shadowed


def _drift_step(g, p, step, direction):
    """Move ``step`` along the graph from ``p``; returns (point, edge, direction)."""
    e, s = p.edge, p.offset
    d = direction
    while True:
        edge = g.edges[e]
        target = s + step if d > 0 else s - step
        if 0 <= target <= edge.length:
            return g.point(e, target), e, d
        step -= (edge.length - s) if d > 0 else s
        w = edge.v if d > 0 else edge.u
        exits = sorted(x for x in g.incident[w] if x[0] != e)
        if not exits:
            return g._canon[w], e, d
        e, end = exits[0]
        d = 1 if end == 0 else -1
        s = mpq(0) if end == 0 else g.lengths[e]


def generate_pseudo_orbit(f, delta, length, strategy="random", seed=0, start=None,
                          cover=None, pattern=None):
    """Build a ``delta``-pseudo-orbit of ``f`` with ``length`` points.

    Strategies: ``random`` (uniform rational point of ``B(f(x_i), delta)``),
    ``drift`` (move ``99/100·delta`` along the graph each step, from ``start``
    or the first vertex), and ``pattern`` (visit ``cover`` members along
    ``pattern``, preferring points whose true orbit can keep following it).
    """
    delta = Q(delta)
    if delta <= 0 or length < 1:
        raise InputError("need delta > 0 and length >= 1")
    g = f.graph
    rng = random.Random(seed)
    if strategy == "random":
        pts = [g.full_region().random_point(rng) if start is None else g.check_point(start)]
        for _ in range(length - 1):
            pts.append(ball(g, evaluate(f, pts[-1]), delta).random_point(rng))
    elif strategy == "drift":
        pts = [g._canon[0] if start is None else g.check_point(start)]
        step = delta - delta / 100
        edge, direction = pts[0].edge, 1
        for _ in range(length - 1):
            y = evaluate(f, pts[-1])
            d = direction if y.edge == edge else 1
            nxt, edge, direction = _drift_step(g, y, step, d)
            pts.append(nxt)
    elif strategy == "pattern":
        if cover is None or pattern is None:
            raise InputError("pattern strategy needs a cover and a pattern")
        pattern = list(pattern)
        if len(pattern) != length:
            raise InputError("pattern length must equal the orbit length")
        trace = realize_pattern(f, cover, pattern).trace
        members = cover.members

        def pick(region, tail):
            pref = region.intersection(tail) if tail is not None else region
            pref = pref.interior() if not pref.interior().is_empty() else pref
            if not pref.is_empty():
                return pref.random_point(rng)
            return region.random_point(rng)

        first = members[pattern[0]]
        pts = [pick(first, trace[0] if trace else None)]
        for i in range(1, length):
            allowed = members[pattern[i]].intersection(ball(g, evaluate(f, pts[-1]), delta))
            if allowed.is_empty():
                raise ConstructionError(
                    f"pattern step {i - 1} -> {i} infeasible at delta={delta}", stage="pseudo-orbit"
                )
            pts.append(pick(allowed, trace[i] if trace else None))
    else:
        raise InputError(f"unknown strategy {strategy!r}")
    return PseudoOrbit(tuple(pts), delta, f)


def assign_pattern(po, cover, lebesgue=None):
    """Cover pattern of a pseudo-orbit.

    ``j_0`` is a member containing ``x_0``; for ``i > 0``, ``j_i`` is a member
    containing both ``x_i`` and ``f(x_{i-1})``.  Ties go to the highest index.
    """
    if lebesgue is None:
        lebesgue = lebesgue_number(cover)
    if po.delta > lebesgue:
        raise PreconditionError("pseudo-orbit delta exceeds the cover's Lebesgue number")
    f = po.map
    members = cover.members
    out = []
    prev_img = None
    for i, x in enumerate(po.points):
        choice = None
        for j in range(cover.k - 1, -1, -1):
            if members[j].contains(x) and (prev_img is None or members[j].contains(prev_img)):
                choice = j
                break
        if choice is None:
            raise ConstructionError(f"no member contains step {i} and its predecessor's image",
                                    stage="assign-pattern")
        out.append(choice)
        prev_img = evaluate(f, x)
    return tuple(out)


def realize_pattern(h, cover, pattern, widen=None):
    """Decide whether some ``x`` has ``h^i(x) ∈ cl U_{j_i}`` for every ``i``.

    Computes ``S_N = cl U_{j_N}`` and ``S_i = cl U_{j_i} ∩ h^{-1}(S_{i+1})``
    backwards with exact preimages; realized iff ``S_0`` is nonempty, and the
    witness is its lexicographically least point.  ``widen`` optionally
    replaces each closure by its closed fattening of the given radius.
    """
    pattern = list(pattern)
    if not pattern:
        raise InputError("empty pattern")
    if any(not 0 <= j < cover.k for j in pattern):
        raise InputError("pattern index out of range")
    targets = []
    for i, j in enumerate(pattern):
        region = cover.closures[j]
        if widen is not None and widen[i] > 0:
            region = fatten(region, widen[i], closed=True)
        targets.append(region)
    sets = [None] * len(pattern)
    current = targets[-1]
    sets[-1] = current
    for i in range(len(pattern) - 2, -1, -1):
        current = preimage_region(h, current, within=targets[i])
        sets[i] = current
        if current.is_empty():
            for k in range(i):
                sets[k] = current
            break
    realized = not sets[0].is_empty()
    witness = sets[0].least_point() if realized else None
    if realized:
        p = witness
        for i, region in enumerate(targets):
            if not region.contains(p):
                raise AssertionError(f"witness fails re-verification at step {i}")
            p = evaluate(h, p)
    return RealizationResult(realized, witness, tuple(sets))


def _grid_points_in(region, resolution):
    g = region.graph
    seen = set()
    for w in sorted(region.vertices):
        p = g._canon[w]
        if p not in seen:
            seen.add(p)
            yield p
    for e in region.edge_ids():
        L = g.lengths[e]
        for lo, hi, lc, hc in region.intervals(e):
            j0 = -((-lo * resolution) // L)
            j1 = (hi * resolution) // L
            for j in range(int(j0), int(j1) + 1):
                t = L * j / resolution
                if region.contains(g.point(e, t)):
                    p = g.point(e, t)
                    if p not in seen:
                        seen.add(p)
                        yield p


def grid_oracle(h, cover, pattern, resolution):
    """Brute-force realization test on the grid of spacing ``L_e / resolution``.

    Step ``i`` tolerates distance ``cell · max(1, Lip h)^i`` to ``cl U_{j_i}``
    (``cell`` = longest edge / resolution); this is exactly the slack needed for
    every exactly realized pattern to be seen by the grid.  Conversely, a
    grid-realized pattern is exactly realized for the widened closures.
    """
    if resolution < 1:
        raise InputError("resolution must be at least 1")
    pattern = list(pattern)
    g = h.graph
    cell = max(g.lengths) / resolution
    lip = max(mpq(1), lipschitz_modulus(h))
    widths = tuple(cell * lip ** i for i in range(len(pattern)))
    targets = [fatten(cover.closures[j], w, closed=True) for j, w in zip(pattern, widths)]
    for p in _grid_points_in(targets[0], resolution):
        q = p
        ok = True
        for region in targets[1:]:
            q = evaluate(h, q)
            if not region.contains(q):
                ok = False
                break
        if ok:
            return OracleVerdict(True, p, widths)
    return OracleVerdict(False, None, widths)


def _forward_sets(f, points, eps):
    g = f.graph
    sets = [ball(g, points[0], eps)]
    for x in points[1:]:
        nxt = image_region(f, sets[-1]).intersection(ball(g, x, eps))
        sets.append(nxt)
        if nxt.is_empty():
            return sets, False
    return sets, True


def check_shadowing(f, po, eps, hint=None):
    """Exact finite-horizon ``eps``-shadowing of a pseudo-orbit.

    Propagates the reachable sets ``A_0 = B(x_0, eps)``,
    ``A_{i+1} = f(A_i) ∩ B(x_{i+1}, eps)``; the pseudo-orbit is shadowed iff
    the last one is nonempty, and a witness is recovered by pulling a point of
    ``A_N`` back through the ``A_i``.  A smaller ``hint`` radius is tried first;
    any witness found there also shadows at ``eps``.
    """
    eps = Q(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    points = list(po.points if isinstance(po, PseudoOrbit) else po)
    g = f.graph
    # fast path: the pseudo-orbit's own start point often shadows it
    q = points[0]
    dists = []
    for x in points:
        d = graph_distance(g, x, q)
        if not d < eps:
            break
        dists.append(d)
        q = evaluate(f, q)
    else:
        return ShadowingVerdict(True, points[0], tuple(dists), eps)
    radii = [eps]
    if hint is not None and 0 < Q(hint) < eps:
        radii.insert(0, Q(hint))
    for radius in radii:
        sets, ok = _forward_sets(f, points, radius)
        if ok:
            break
    if not ok:
        return ShadowingVerdict(False, None, (), eps)
    y = sets[-1].representative_point()
    for i in range(len(points) - 2, -1, -1):
        y = preimage_region(f, g.point_region(y), within=sets[i]).representative_point()
    witness = y
    dists = []
    q = witness
    for i, x in enumerate(points):
        d = graph_distance(g, x, q)
        if not d < eps:
            raise AssertionError(f"shadowing witness fails re-verification at step {i}")
        dists.append(d)
        q = evaluate(f, q)
    return ShadowingVerdict(True, witness, tuple(dists), eps)
