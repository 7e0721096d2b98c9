"""Finite taut open covers of a metric graph by connected regions."""

from functools import cached_property
from math import ceil

from .errors import ConstructionError, InputError
from .metric_graph import Region, ball, fatten, region_diameter, region_distance, region_intersects
from .pl_map import image_region, lipschitz_modulus
from .rational import Q, fmt, mpq

__all__ = [
    "TautCover",
    "PLFunction",
    "build_taut_cover",
    "lebesgue_number",
    "core_set",
    "core_sets",
]

_ZERO = mpq(0)


class PLFunction:
    """Continuous piecewise-linear function on ``[xs[0], xs[-1]]`` given by nodes."""

    __slots__ = ("xs", "ys")

    def __init__(self, xs, ys):
        self.xs = list(xs)
        self.ys = list(ys)

    @classmethod
    def affine(cls, a, b, ya, yb):
        return cls([a, b], [ya, yb])

    def __call__(self, x):
        xs, ys = self.xs, self.ys
        for k in range(len(xs) - 1):
            if xs[k] <= x <= xs[k + 1]:
                if xs[k + 1] == xs[k]:
                    return ys[k]
                return ys[k] + (ys[k + 1] - ys[k]) * (x - xs[k]) / (xs[k + 1] - xs[k])
        raise InputError("x outside the function's domain")

    def _combine(self, other, pick):
        xs = sorted(set(self.xs) | set(other.xs))
        out_x, out_y = [], []
        prev = None
        for x in xs:
            a, b = self(x), other(x)
            if prev is not None:
                px, pa, pb = prev
                da, db = pa - pb, a - b
                if (da < 0 < db) or (db < 0 < da):
                    cx = px + (x - px) * da / (da - db)
                    out_x.append(cx)
                    out_y.append(pa + (a - pa) * (cx - px) / (x - px))
            out_x.append(x)
            out_y.append(pick(a, b))
            prev = (x, a, b)
        return PLFunction(out_x, out_y)

    def maximum(self, other):
        return self._combine(other, max)

    def minimum(self, other):
        return self._combine(other, min)

    def min_value(self):
        return min(self.ys)

    def max_value(self):
        return max(self.ys)


class TautCover:
    """A finite taut open cover ``members[0..k-1]`` of a metric graph.

    Validation (on construction unless ``check=False``) enforces that members
    are nonempty, open and connected, that they cover the graph, and both
    tautness conditions.  Member indices are 0-based.
    """

    def __init__(self, graph, members, check=True):
        self.graph = graph
        self.members = tuple(members)
        for m in self.members:
            if m.graph is not graph:
                raise InputError("cover member lives on another graph")
        if check:
            problems = self.problems()
            if problems:
                raise InputError("invalid taut cover: " + "; ".join(problems))

    def __len__(self):
        return len(self.members)

    @property
    def k(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, i):
        return self.members[i]

    @cached_property
    def closures(self):
        return tuple(m.closure() for m in self.members)

    @cached_property
    def closure_meets(self):
        """``closure_meets[i]`` = indices ``j`` with ``cl U_i ∩ cl U_j ≠ ∅`` (includes ``i``)."""
        cl = self.closures
        k = self.k
        out = [set([i]) for i in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                if region_intersects(cl[i], cl[j]):
                    out[i].add(j)
                    out[j].add(i)
        return tuple(frozenset(s) for s in out)

    @cached_property
    def _index(self):
        by_edge, by_vertex = {}, {}
        for j, c in enumerate(self.closures):
            for e in c.edge_ids():
                by_edge.setdefault(e, []).append(j)
            for w in c.vertices:
                by_vertex.setdefault(w, []).append(j)
        return by_edge, by_vertex

    def candidates(self, region):
        """Indices whose closures could meet ``region`` (a superset, sorted)."""
        by_edge, by_vertex = self._index
        out = set()
        for e in region.edge_ids():
            out.update(by_edge.get(e, ()))
        for w in region.vertices:
            out.update(by_vertex.get(w, ()))
        return sorted(out)

    @cached_property
    def closure_distances(self):
        cl = self.closures
        k = self.k
        d = [[_ZERO] * k for _ in range(k)]
        for i in range(k):
            for j in range(i + 1, k):
                d[i][j] = d[j][i] = region_distance(cl[i], cl[j])
        return d

    @cached_property
    def diameters(self):
        return tuple(region_diameter(self.graph, m) for m in self.members)

    def image_diameters(self, f):
        return tuple(region_diameter(self.graph, image_region(f, m)) for m in self.members)

    def union(self, indices):
        idx = list(indices)
        out = self.members[idx[0]]
        if len(idx) > 1:
            out = out.union(*(self.members[j] for j in idx[1:]))
        return out

    def problems(self):
        """List of violated cover/tautness conditions (empty when valid)."""
        g = self.graph
        out = []
        if not self.members:
            return ["cover has no members"]
        for i, m in enumerate(self.members):
            if m.is_empty():
                out.append(f"member {i} is empty")
            elif not m.is_open():
                out.append(f"member {i} is not open")
            elif not m.is_connected:
                out.append(f"member {i} is not connected")
        if out:
            return out
        if self.union(range(self.k)) != g.full_region():
            out.append("members do not cover the graph")
        for i in range(self.k):
            for j in self.closure_meets[i]:
                if j > i and not region_intersects(self.members[i], self.members[j]):
                    out.append(f"tautness (1) fails: closures of {i} and {j} meet but members do not")
        for i in range(self.k):
            others = [self.closures[j] for j in self.closure_meets[i] if j != i]
            private = self.members[i]
            if others:
                private = private.difference(others[0].union(*others[1:]))
            if private.is_empty():
                out.append(f"tautness (2) fails: member {i} has no private part")
        return out

    def is_valid_for(self, f, eps):
        """Diameter conditions: every ``diam(U_i)`` and ``diam(f(U_i))`` below ``eps/5``."""
        bound = Q(eps) / 5
        return all(d < bound for d in self.diameters) and all(
            d < bound for d in self.image_diameters(f)
        )

    def __repr__(self):
        return f"TautCover(k={self.k})"


def _node_points(graph, r):
    """Vertices plus equally spaced interior points, spacing in ``(r, 3r/2]``."""
    nodes = []
    seen = set()
    for e, edge in enumerate(graph.edges):
        m = max(3, ceil(edge.length / (3 * r / 2)))
        if edge.u not in seen:
            seen.add(edge.u)
            nodes.append(graph._canon[edge.u])
        for j in range(1, m):
            nodes.append(graph.point(e, edge.length * j / m))
        if edge.v not in seen:
            seen.add(edge.v)
            nodes.append(graph._canon[edge.v])
    return nodes


def build_taut_cover(graph, f, eps, max_rounds=32):
    """Taut open cover by connected balls with member and image diameters below ``eps/5``.

    Members are open balls of radius ``r`` around the vertices and around
    equally spaced subdivision points (spacing strictly between ``r`` and
    ``2r``), which makes the cover taut by construction; the result is then
    validated exactly.  ``r`` is halved until the diameter conditions hold.
    """
    eps = Q(eps)
    if eps <= 0:
        raise InputError("eps must be positive")
    if f.graph is not graph:
        raise InputError("map lives on another graph")
    whole = graph.full_region()
    if 5 * region_diameter(graph, whole) < eps:
        return TautCover(graph, [whole])
    lip = max(mpq(1), lipschitz_modulus(f))
    r = min(eps / (11 * lip), min(graph.lengths) / 4)
    problems = []
    for _ in range(max_rounds):
        members = [ball(graph, p, r) for p in _node_points(graph, r)]
        cover = TautCover(graph, members, check=False)
        problems = cover.problems()
        if not problems and cover.is_valid_for(f, eps):
            return cover
        r = r / 2
    raise ConstructionError(
        f"no taut cover with diameters below {fmt(eps / 5)} after {max_rounds} rounds"
        + (f": {problems[0]}" if problems else ""),
        stage="cover",
    )


def _distance_function(graph, e, closed_set):
    """``s ↦ d((e, s), closed_set)`` on edge ``e`` as a PLFunction."""
    edge = graph.edges[e]
    L = edge.length
    dv = closed_set.vertex_distances
    fn = PLFunction.affine(_ZERO, L, dv[edge.u], dv[edge.u] + L).minimum(
        PLFunction.affine(_ZERO, L, dv[edge.v] + L, dv[edge.v])
    )
    for lo, hi, _, _ in closed_set.intervals(e):
        nodes = {}
        for x, y in ((_ZERO, lo), (lo, _ZERO), (hi, _ZERO), (L, L - hi)):
            nodes.setdefault(x, y)
        fn = fn.minimum(PLFunction(list(nodes), list(nodes.values())))
    return fn


def lebesgue_number(cover):
    """Exact ``inf_x max_i d(x, X \\ U_i)``.

    Every set of smaller diameter lies inside a single member.  The
    single-member cover ``{X}`` returns half the diameter of ``X``.
    """
    g = cover.graph
    if cover.k == 1:
        return region_diameter(g, g.full_region()) / 2
    comps = [m.complement() for m in cover.members]
    best = None
    for e, edge in enumerate(g.edges):
        F = PLFunction.affine(_ZERO, edge.length, _ZERO, _ZERO)
        for i, m in enumerate(cover.members):
            if not m.intervals(e) and edge.u not in m.vertices and edge.v not in m.vertices:
                continue
            if comps[i].is_empty():
                continue
            F = F.maximum(_distance_function(g, e, comps[i]))
        v = F.min_value()
        if best is None or v < best:
            best = v
    return best


def core_sets(cover, eta):
    """``C_i = {u ∈ U_i : d(u, cl U_j) > η for all j ≠ i}`` for every ``i``."""
    eta = Q(eta)
    if eta <= 0:
        raise InputError("eta must be positive")
    dist = cover.closure_distances
    fat = {}
    out = []
    for i, m in enumerate(cover.members):
        near = [j for j in range(cover.k) if j != i and dist[i][j] <= eta]
        for j in near:
            if j not in fat:
                fat[j] = fatten(cover.closures[j], eta, closed=True)
        if near:
            m = m.difference(fat[near[0]].union(*(fat[j] for j in near[1:])))
        out.append(m)
    return out


def core_set(cover, i, eta):
    """Points of ``U_i`` more than ``eta`` away from every other member's closure (may be empty)."""
    if not 0 <= i < cover.k:
        raise InputError(f"member index {i} out of range")
    eta = Q(eta)
    if eta <= 0:
        raise InputError("eta must be positive")
    m = cover.members[i]
    for j in range(cover.k):
        if j != i and cover.closure_distances[i][j] <= eta:
            m = m.difference(fatten(cover.closures[j], eta, closed=True))
    return m
