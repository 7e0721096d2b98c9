"""Finite metric graphs with exact rational geometry and a region algebra.

A :class:`MetricGraph` is a connected finite graph (loops and multi-edges
allowed) whose edges carry positive rational lengths; the metric is the
intrinsic shortest-path metric.  Points are ``(edge, offset)`` pairs.  A
:class:`Region` is a finite union of subintervals of open edges plus a finite
set of vertices, each interval endpoint tagged open or closed.

Everything here is immutable and exact.
"""

from bisect import bisect_right
from collections import defaultdict, namedtuple
from dataclasses import dataclass
from functools import cached_property
import heapq

from .errors import InputError
from .rational import Q, fmt, mpq

__all__ = [
    "Edge",
    "GraphPoint",
    "MetricGraph",
    "Region",
    "graph_distance",
    "region_diameter",
    "region_intersects",
    "region_distance",
    "ball",
    "fatten",
    "region_path",
]

Edge = namedtuple("Edge", "u v length")

_ZERO = mpq(0)


@dataclass(frozen=True)
class GraphPoint:
    """A point of a metric graph: ``offset`` along ``edge`` from its first vertex.

    Always obtain points through :meth:`MetricGraph.point`, which canonicalizes
    vertex points to a single representative.
    """

    edge: int
    offset: object

    def key(self):
        return (self.edge, self.offset)

    def __repr__(self):
        return f"GraphPoint({self.edge}, {fmt(self.offset)})"


class MetricGraph:
    """Connected finite graph with rational edge lengths.

    Parameters
    ----------
    vertices : sequence of hashable
        Vertex identifiers (unique).
    edges : sequence of (u, v, length)
        Endpoints are vertex identifiers; ``length`` is a positive rational.
        Edge ids are positions in this sequence.
    """

    def __init__(self, vertices, edges):
        vertices = list(vertices)
        if len(set(vertices)) != len(vertices):
            raise InputError("vertex identifiers must be unique")
        if not edges:
            raise InputError("a metric graph needs at least one edge")
        self.vertices = tuple(vertices)
        self._vindex = {v: i for i, v in enumerate(vertices)}
        built = []
        for eid, (u, v, length) in enumerate(edges):
            if u not in self._vindex or v not in self._vindex:
                raise InputError(f"edge {eid} references an unknown vertex")
            length = Q(length)
            if length <= 0:
                raise InputError(f"edge {eid} has non-positive length {fmt(length)}")
            built.append(Edge(self._vindex[u], self._vindex[v], length))
        self.edges = tuple(built)
        self.lengths = tuple(e.length for e in built)
        nv = len(vertices)
        self.incident = [[] for _ in range(nv)]  # (edge, end) with end 0 = offset 0
        for eid, e in enumerate(built):
            self.incident[e.u].append((eid, 0))
            self.incident[e.v].append((eid, 1))
        for w in range(nv):
            if not self.incident[w]:
                raise InputError(f"vertex {vertices[w]!r} is isolated; graph must be connected")
        self.dist = self._all_pairs()
        for row in self.dist:
            if any(d is None for d in row):
                raise InputError("metric graph must be connected")
        # canonical representative of each vertex: lowest incident edge, offset 0 preferred
        self._canon = []
        for w in range(nv):
            eid, end = min(self.incident[w])
            self._canon.append(GraphPoint(eid, _ZERO if end == 0 else built[eid].length))

    def _all_pairs(self):
        nv = len(self.vertices)
        d = [[None] * nv for _ in range(nv)]
        for w in range(nv):
            d[w][w] = _ZERO
        for e in self.edges:
            if e.u != e.v and (d[e.u][e.v] is None or e.length < d[e.u][e.v]):
                d[e.u][e.v] = d[e.v][e.u] = e.length
        for k in range(nv):
            dk = d[k]
            for i in range(nv):
                dik = d[i][k]
                if dik is None:
                    continue
                di = d[i]
                for j in range(nv):
                    dkj = dk[j]
                    if dkj is not None and (di[j] is None or dik + dkj < di[j]):
                        di[j] = dik + dkj
        return d

    # -- points -----------------------------------------------------------
    def point(self, edge, offset):
        """Validated, canonical point at ``offset`` along ``edge``."""
        if not isinstance(edge, int) or not 0 <= edge < len(self.edges):
            raise InputError(f"invalid edge id {edge!r}")
        offset = Q(offset)
        e = self.edges[edge]
        if offset < 0 or offset > e.length:
            raise InputError(
                f"offset {fmt(offset)} out of range [0, {fmt(e.length)}] on edge {edge}"
            )
        if offset == 0:
            return self._canon[e.u]
        if offset == e.length:
            return self._canon[e.v]
        return GraphPoint(edge, offset)

    def vertex_point(self, vertex):
        """Canonical point of a vertex given by identifier."""
        if vertex not in self._vindex:
            raise InputError(f"unknown vertex {vertex!r}")
        return self._canon[self._vindex[vertex]]

    def vertex_index(self, vertex):
        return self._vindex[vertex]

    def vertex_at(self, p):
        """Vertex index of ``p`` if it is a vertex, else ``None``."""
        e = self.edges[p.edge]
        if p.offset == 0:
            return e.u
        if p.offset == e.length:
            return e.v
        return None

    def check_point(self, p):
        if not isinstance(p, GraphPoint):
            raise InputError(f"not a GraphPoint: {p!r}")
        return self.point(p.edge, p.offset)

    def total_length(self):
        return sum(self.lengths, _ZERO)

    def distance(self, p, q):
        return graph_distance(self, p, q)

    # -- regions ----------------------------------------------------------
    def full_region(self):
        return Region(
            self,
            {e: ((_ZERO, L, False, False),) for e, L in enumerate(self.lengths)},
            frozenset(range(len(self.vertices))),
        )

    def empty_region(self):
        return Region(self, {}, frozenset())

    def point_region(self, p):
        p = self.check_point(p)
        w = self.vertex_at(p)
        if w is not None:
            return Region(self, {}, frozenset([w]))
        return Region(self, {p.edge: ((p.offset, p.offset, True, True),)}, frozenset())

    def interval(self, edge, lo, hi, lo_closed=False, hi_closed=False):
        """Region consisting of one subinterval of ``edge``."""
        if not 0 <= edge < len(self.edges):
            raise InputError(f"invalid edge id {edge!r}")
        lo, hi = Q(lo), Q(hi)
        L = self.lengths[edge]
        if lo < 0 or hi > L or lo > hi:
            raise InputError(f"interval [{fmt(lo)}, {fmt(hi)}] invalid on edge {edge}")
        return Region.build(self, [(edge, lo, hi, lo_closed, hi_closed)])

    def __repr__(self):
        es = ", ".join(
            f"{self.vertices[e.u]}-{self.vertices[e.v]}:{fmt(e.length)}" for e in self.edges
        )
        return f"MetricGraph([{es}])"


def graph_distance(g, p, q):
    """Exact shortest-path distance between two points of ``g``."""
    e1 = g.edges[p.edge]
    e2 = g.edges[q.edge]
    s, t = p.offset, q.offset
    D = g.dist
    a = s + t
    best = min(
        a + D[e1.u][e2.u],
        s + D[e1.u][e2.v] + e2.length - t,
        e1.length - s + D[e1.v][e2.u] + t,
        e1.length + e2.length - a + D[e1.v][e2.v],
    )
    if p.edge == q.edge:
        direct = s - t if s >= t else t - s
        if direct < best:
            best = direct
    return best


# ---------------------------------------------------------------------------
# Region algebra
# ---------------------------------------------------------------------------


def _merge(ivs):
    ivs.sort(key=lambda t: (t[0], not t[2]))
    out = []
    for lo, hi, lc, hc in ivs:
        if out:
            plo, phi, plc, phc = out[-1]
            if lo < phi or (lo == phi and (phc or lc)):
                if hi > phi:
                    out[-1] = (plo, hi, plc, hc)
                elif hi == phi:
                    out[-1] = (plo, phi, plc, phc or hc)
                continue
        out.append((lo, hi, lc, hc))
    return tuple(out)


def _intersect_lists(A, B):
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        alo, ahi, alc, ahc = A[i]
        blo, bhi, blc, bhc = B[j]
        if alo > blo:
            lo, lc = alo, alc
        elif blo > alo:
            lo, lc = blo, blc
        else:
            lo, lc = alo, alc and blc
        if ahi < bhi:
            hi, hc = ahi, ahc
            i += 1
        elif bhi < ahi:
            hi, hc = bhi, bhc
            j += 1
        else:
            hi, hc = ahi, ahc and bhc
            i += 1
            j += 1
        if lo < hi or (lo == hi and lc and hc):
            out.append((lo, hi, lc, hc))
    return tuple(out)


class Region:
    """Finite union of edge subintervals and vertices of a metric graph.

    Intervals are stored per edge, sorted, pairwise disjoint and non-touching,
    and live in the open edge ``(0, L)``; membership of the edge's endpoints is
    recorded only in the vertex set.  Use :meth:`build` to construct from raw
    intervals.
    """

    __slots__ = ("graph", "_edges", "vertices", "__dict__")

    def __init__(self, graph, edges, vertices):
        self.graph = graph
        self._edges = {e: ivs for e, ivs in edges.items() if ivs}
        self.vertices = vertices

    @classmethod
    def build(cls, graph, intervals=(), vertices=()):
        """Normalize raw ``(edge, lo, hi, lo_closed, hi_closed)`` tuples.

        Intervals may extend past the edge; they are clipped (closed at the
        clipped end).  Closed ends at offset 0 or ``L`` add the vertex.
        """
        verts = set(vertices)
        per = defaultdict(list)
        lengths = graph.lengths
        edges = graph.edges
        for e, lo, hi, lc, hc in intervals:
            L = lengths[e]
            if lo < 0:
                lo, lc = _ZERO, True
            if hi > L:
                hi, hc = L, True
            if lo > hi or (lo == hi and not (lc and hc)):
                continue
            if lo == 0 and lc:
                verts.add(edges[e].u)
                lc = False
            if hi == L and hc:
                verts.add(edges[e].v)
                hc = False
            if lo == hi and not (lc and hc):
                continue
            per[e].append((lo, hi, lc, hc))
        return cls(graph, {e: _merge(ivs) for e, ivs in per.items()}, frozenset(verts))

    # -- inspection -------------------------------------------------------
    def intervals(self, edge):
        return self._edges.get(edge, ())

    def edge_ids(self):
        return sorted(self._edges)

    def pieces(self):
        """Yield ``('v', w)`` for vertices and ``('e', e, lo, hi, lc, hc)`` for intervals."""
        for w in sorted(self.vertices):
            yield ("v", w)
        for e in sorted(self._edges):
            for iv in self._edges[e]:
                yield ("e", e) + iv

    def is_empty(self):
        return not self._edges and not self.vertices

    def __bool__(self):
        return not self.is_empty()

    def contains(self, p):
        w = self.graph.vertex_at(p)
        if w is not None:
            return w in self.vertices
        ivs = self._edges.get(p.edge)
        if not ivs:
            return False
        s = p.offset
        k = bisect_right(ivs, (s, s, True, True)) - 1
        for idx in (k, k + 1):
            if 0 <= idx < len(ivs):
                lo, hi, lc, hc = ivs[idx]
                if (lo < s or (lo == s and lc)) and (s < hi or (s == hi and hc)):
                    return True
        return False

    __contains__ = contains

    def measure(self):
        """Total length (one-dimensional Lebesgue measure)."""
        return sum((hi - lo for ivs in self._edges.values() for lo, hi, _, _ in ivs), _ZERO)

    def _key(self):
        return (tuple(sorted(self._edges.items())), self.vertices)

    def __eq__(self, other):
        if not isinstance(other, Region):
            return NotImplemented
        return self.graph is other.graph and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        parts = [f"v{self.graph.vertices[w]}" for w in sorted(self.vertices)]
        for e in sorted(self._edges):
            for lo, hi, lc, hc in self._edges[e]:
                parts.append(f"e{e}{'[' if lc else '('}{fmt(lo)},{fmt(hi)}{']' if hc else ')'}")
        return "Region(" + " ∪ ".join(parts) + ")"

    # -- set algebra ------------------------------------------------------
    def _same(self, other):
        if other.graph is not self.graph:
            raise InputError("regions live on different graphs")

    def union(self, *others):
        per = defaultdict(list)
        verts = set(self.vertices)
        for r in (self,) + others:
            self._same(r)
            verts |= r.vertices
            for e, ivs in r._edges.items():
                per[e].extend(ivs)
        return Region(self.graph, {e: _merge(ivs) for e, ivs in per.items()}, frozenset(verts))

    __or__ = union

    def intersection(self, other):
        self._same(other)
        edges = {}
        for e, ivs in self._edges.items():
            o = other._edges.get(e)
            if o:
                edges[e] = _intersect_lists(ivs, o)
        return Region(self.graph, edges, self.vertices & other.vertices)

    __and__ = intersection

    def complement(self):
        edges = {}
        for e, L in enumerate(self.graph.lengths):
            ivs = self._edges.get(e, ())
            out = []
            plo, pclosed = _ZERO, True  # previous boundary and whether it belonged to self
            for lo, hi, lc, hc in ivs:
                if plo < lo or (plo == lo and not pclosed and not lc):
                    out.append((plo, lo, not pclosed, not lc))
                plo, pclosed = hi, hc
            if plo < L:
                out.append((plo, L, not pclosed, False))
            edges[e] = tuple(iv for iv in out if iv[0] < iv[1] or (iv[2] and iv[3]))
        allv = frozenset(range(len(self.graph.vertices)))
        return Region(self.graph, edges, allv - self.vertices)

    def difference(self, other):
        return self.intersection(other.complement())

    __sub__ = difference

    def closure(self):
        verts = set(self.vertices)
        raw = []
        for e, ivs in self._edges.items():
            for lo, hi, _, _ in ivs:
                raw.append((e, lo, hi, True, True))
        return Region.build(self.graph, raw, verts)

    def interior(self):
        g = self.graph
        edges = {}
        for e, ivs in self._edges.items():
            edges[e] = tuple((lo, hi, False, False) for lo, hi, _, _ in ivs if lo < hi)
        verts = set()
        for w in self.vertices:
            ok = True
            for eid, end in g.incident[w]:
                ivs = self._edges.get(eid, ())
                if end == 0:
                    ok = bool(ivs) and ivs[0][0] == 0 and ivs[0][0] < ivs[0][1]
                else:
                    ok = bool(ivs) and ivs[-1][1] == g.lengths[eid] and ivs[-1][0] < ivs[-1][1]
                if not ok:
                    break
            if ok:
                verts.add(w)
        return Region(g, edges, frozenset(verts))

    def is_open(self):
        return self.interior() == self

    def is_closed(self):
        return self.closure() == self

    def issubset(self, other):
        return self.difference(other).is_empty()

    def intersects(self, other, closure=False):
        return region_intersects(self, other, closure=closure)

    # -- topology ---------------------------------------------------------
    def components(self):
        """Connected components, as a list of Regions."""
        g = self.graph
        nodes = [("v", w) for w in sorted(self.vertices)]
        for e in sorted(self._edges):
            for k in range(len(self._edges[e])):
                nodes.append(("e", e, k))
        index = {n: i for i, n in enumerate(nodes)}
        parent = list(range(len(nodes)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def join(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb

        for e, ivs in self._edges.items():
            edge = g.edges[e]
            for k, (lo, hi, _, _) in enumerate(ivs):
                me = index[("e", e, k)]
                if lo == 0 and edge.u in self.vertices:
                    join(me, index[("v", edge.u)])
                if hi == edge.length and edge.v in self.vertices:
                    join(me, index[("v", edge.v)])
        groups = defaultdict(lambda: (defaultdict(list), set()))
        for n, i in index.items():
            ed, vs = groups[find(i)]
            if n[0] == "v":
                vs.add(n[1])
            else:
                ed[n[1]].append(self._edges[n[1]][n[2]])
        return [Region(g, {e: tuple(v) for e, v in ed.items()}, frozenset(vs)) for ed, vs in groups.values()]

    @cached_property
    def is_connected(self):
        """True iff nonempty and connected (cached; recomputable via components())."""
        return len(self.components()) == 1

    # -- distances --------------------------------------------------------
    @cached_property
    def vertex_distances(self):
        """``d(w, closure(self))`` for every vertex index ``w`` (``None`` if empty)."""
        g = self.graph
        nv = len(g.vertices)
        seed = [None] * nv
        for w in self.vertices:
            seed[w] = _ZERO
        for e, ivs in self._edges.items():
            edge = g.edges[e]
            a = ivs[0][0]
            b = edge.length - ivs[-1][1]
            if seed[edge.u] is None or a < seed[edge.u]:
                seed[edge.u] = a
            if seed[edge.v] is None or b < seed[edge.v]:
                seed[edge.v] = b
        D = g.dist
        out = []
        sources = [(x, s) for x, s in enumerate(seed) if s is not None]
        for w in range(nv):
            best = None
            for x, s in sources:
                c = s + D[x][w]
                if best is None or c < best:
                    best = c
            out.append(best)
        return out

    def least_point(self):
        """Lexicographically least point over ``(edge, offset)`` representations.

        Returns ``None`` when the infimum is not attained (possible only for
        non-closed regions).  The result is canonicalized.
        """
        g = self.graph
        best = None
        attained = False
        for e, edge in enumerate(g.edges):
            cands = []
            if edge.u in self.vertices:
                cands.append(((e, _ZERO), True))
            ivs = self._edges.get(e)
            if ivs:
                cands.append(((e, ivs[0][0]), ivs[0][2]))
            if edge.v in self.vertices:
                cands.append(((e, edge.length), True))
            if not cands:
                continue
            key, ok = min(cands, key=lambda c: (c[0], not c[1]))
            best, attained = key, ok
            break
        if best is None or not attained:
            return None
        return g.point(*best)

    def representative_point(self):
        """A deterministic point of the region: the least point when attained."""
        p = self.least_point()
        if p is not None:
            return p
        if self.is_empty():
            return None
        e = min(self._edges)
        lo, hi, lc, hc = self._edges[e][0]
        return self.graph.point(e, (lo + hi) / 2)

    def random_point(self, rng, resolution=1 << 20):
        """Random point of the region with rational offset (deterministic per ``rng``)."""
        ivs = [(e, iv) for e in sorted(self._edges) for iv in self._edges[e] if iv[0] < iv[1]]
        if not ivs:
            if self.is_empty():
                raise InputError("cannot sample from an empty region")
            pts = [("v", w) for w in sorted(self.vertices)]
            pts += [("p", e, iv[0]) for e in sorted(self._edges) for iv in self._edges[e]]
            pick = pts[rng.randrange(len(pts))]
            if pick[0] == "v":
                return self.graph._canon[pick[1]]
            return self.graph.point(pick[1], pick[2])
        weights = [float(iv[1] - iv[0]) for _, iv in ivs]
        e, (lo, hi, _, _) = rng.choices(ivs, weights=weights)[0]
        frac = mpq(rng.randrange(1, resolution), resolution)
        return self.graph.point(e, lo + (hi - lo) * frac)


def _check_same(a, b):
    if a.graph is not b.graph:
        raise InputError("regions live on different graphs")


def region_intersects(a, b, closure=False):
    """Exact intersection test; with ``closure=True`` tests ``cl a ∩ cl b``."""
    _check_same(a, b)
    if closure:
        a, b = a.closure(), b.closure()
    if a.vertices & b.vertices:
        return True
    for e, ivs in a._edges.items():
        o = b._edges.get(e)
        if o and _intersect_lists(ivs, o):
            return True
    return False


def region_distance(a, b):
    """``inf { d(x, y) : x ∈ a, y ∈ b }`` (equals the distance between closures)."""
    _check_same(a, b)
    if a.is_empty() or b.is_empty():
        raise InputError("distance to an empty region is undefined")
    g = a.graph
    db = b.vertex_distances
    best = None
    for w in a.vertices:
        if best is None or db[w] < best:
            best = db[w]
    for e, ivs in a._edges.items():
        edge = g.edges[e]
        other = b._edges.get(e, ())
        for lo, hi, _, _ in ivs:
            c = min(lo + db[edge.u], edge.length - hi + db[edge.v])
            for olo, ohi, _, _ in other:
                gap = olo - hi if olo > hi else (lo - ohi if lo > ohi else _ZERO)
                if gap < c:
                    c = gap
            if best is None or c < best:
                best = c
    return best


def point_region_distance(p, r):
    return region_distance(r.graph.point_region(p), r)


def fatten(r, radius, closed=False):
    """``{x : d(x, r) < radius}`` (or ``<=`` when ``closed``)."""
    radius = Q(radius)
    g = r.graph
    if r.is_empty():
        return g.empty_region()
    dr = r.vertex_distances
    raw = []
    if closed:
        def within(d):
            return d <= radius
    else:
        def within(d):
            return d < radius
    for e, edge in enumerate(g.edges):
        L = edge.length
        if within(dr[edge.u]):
            raw.append((e, _ZERO, radius - dr[edge.u], True, closed))
        if within(dr[edge.v]):
            raw.append((e, L - (radius - dr[edge.v]), L, closed, True))
        for lo, hi, _, _ in r._edges.get(e, ()):
            raw.append((e, lo - radius, hi + radius, closed, closed))
    verts = [w for w in range(len(g.vertices)) if within(dr[w])]
    return Region.build(g, raw, verts)


def ball(g, p, rho):
    """Open metric ball ``B(p, rho)`` as a Region."""
    rho = Q(rho)
    if rho <= 0:
        raise InputError("ball radius must be positive")
    return fatten(g.point_region(p), rho)


def closed_ball(g, p, rho):
    return fatten(g.point_region(p), Q(rho), closed=True)


# ---------------------------------------------------------------------------
# Diameter: maximize the piecewise-linear distance over pairs of pieces
# ---------------------------------------------------------------------------


def _piece_boxes(r):
    g = r.graph
    boxes = []
    for w in sorted(r.vertices):
        p = g._canon[w]
        boxes.append((p.edge, p.offset, p.offset))
    for e in sorted(r._edges):
        for lo, hi, _, _ in r._edges[e]:
            boxes.append((e, lo, hi))
    return boxes


def _pair_sup(g, b1, b2):
    e1, s0, s1 = b1
    e2, t0, t2 = b2
    E1, E2 = g.edges[e1], g.edges[e2]
    D = g.dist
    L1, L2 = E1.length, E2.length
    affs = [
        (1, 1, D[E1.u][E2.u]),
        (1, -1, D[E1.u][E2.v] + L2),
        (-1, 1, L1 + D[E1.v][E2.u]),
        (-1, -1, L1 + L2 + D[E1.v][E2.v]),
    ]
    same = e1 == e2

    def value(s, t):
        v = min(a * s + b * t + c for a, b, c in affs)
        if same:
            d = s - t if s >= t else t - s
            if d < v:
                v = d
        return v

    lines = {(1, 0, -s0), (1, 0, -s1), (0, 1, -t0), (0, 1, -t2)}
    terms = list(affs)
    if same:
        terms += [(1, -1, _ZERO), (-1, 1, _ZERO)]
    for i in range(len(terms)):
        for j in range(i + 1, len(terms)):
            a = terms[i][0] - terms[j][0]
            b = terms[i][1] - terms[j][1]
            if a or b:
                lines.add((a, b, terms[i][2] - terms[j][2]))
    lines = list(lines)
    best = None
    for i in range(len(lines)):
        a1, b1_, c1 = lines[i]
        for j in range(i + 1, len(lines)):
            a2, b2_, c2 = lines[j]
            det = a1 * b2_ - a2 * b1_
            if det == 0:
                continue
            s = mpq(-c1 * b2_ + c2 * b1_) / det
            t = mpq(-a1 * c2 + a2 * c1) / det
            if s0 <= s <= s1 and t0 <= t <= t2:
                v = value(s, t)
                if best is None or v > best:
                    best = v
    return best


def region_diameter(g, r):
    """Exact ``sup { d(x, y) : x, y ∈ r }``."""
    if r.graph is not g:
        raise InputError("region does not belong to this graph")
    if r.is_empty():
        raise InputError("diameter of an empty region is undefined")
    boxes = _piece_boxes(r)
    best = _ZERO
    for i in range(len(boxes)):
        for j in range(i, len(boxes)):
            v = _pair_sup(g, boxes[i], boxes[j])
            if v > best:
                best = v
    return best


# ---------------------------------------------------------------------------
# Paths inside a region
# ---------------------------------------------------------------------------


def region_path(r, p, q):
    """Shortest walk from ``p`` to ``q`` staying inside ``r``.

    Returns a list of legs ``(edge, t_from, t_to)`` (empty when ``p == q``), or
    ``None`` when ``p`` and ``q`` lie in different components of ``r``.
    Intended for open regions, where every interval touching a member vertex
    continues through it.
    """
    g = r.graph
    if not (r.contains(p) and r.contains(q)):
        raise InputError("path endpoints must lie in the region")
    if p == q:
        return []
    adj = defaultdict(list)  # node -> (node, weight, leg)

    def link(a, b, w, leg):
        adj[a].append((b, w, leg))
        adj[b].append((a, w, (leg[0], leg[2], leg[1])))

    for e, ivs in r._edges.items():
        edge = g.edges[e]
        for lo, hi, _, _ in ivs:
            if lo == 0 and hi == edge.length and edge.u in r.vertices and edge.v in r.vertices:
                link(("v", edge.u), ("v", edge.v), edge.length, (e, _ZERO, edge.length))

    def attach(name, pt):
        w = g.vertex_at(pt)
        if w is not None:
            return ("v", w), None
        s = pt.offset
        edge = g.edges[pt.edge]
        for lo, hi, lc, hc in r._edges[pt.edge]:
            if (lo < s or (lo == s and lc)) and (s < hi or (s == hi and hc)):
                if lo == 0 and edge.u in r.vertices:
                    link(name, ("v", edge.u), s, (pt.edge, s, _ZERO))
                if hi == edge.length and edge.v in r.vertices:
                    link(name, ("v", edge.v), edge.length - s, (pt.edge, s, edge.length))
                return name, (pt.edge, lo, hi)
        raise InputError("point not in region")

    src, piv = attach("p", p)
    dst, qiv = attach("q", q)
    if piv is not None and piv == qiv:
        link(src, dst, abs(p.offset - q.offset), (p.edge, p.offset, q.offset))

    dist = {src: _ZERO}
    prev = {}
    heap = [(_ZERO, 0, src)]
    counter = 1
    done = set()
    while heap:
        d, _, node = heapq.heappop(heap)
        if node in done:
            continue
        done.add(node)
        if node == dst:
            break
        for nxt, w, leg in adj[node]:
            nd = d + w
            if nxt not in dist or nd < dist[nxt]:
                dist[nxt] = nd
                prev[nxt] = (node, leg)
                heapq.heappush(heap, (nd, counter, nxt))
                counter += 1
    if dst not in done:
        return None
    legs = []
    node = dst
    while node != src:
        node, leg = prev[node][0], prev[node][1]
        legs.append(leg)
    legs.reverse()
    return [leg for leg in legs if leg[1] != leg[2]] or []
