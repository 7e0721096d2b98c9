"""Piecewise-linear continuous self-maps of a metric graph.

Internally every edge ``e`` is cut at breakpoints ``0 = x_0 < ... < x_m = L``
and each cell ``[x_k, x_{k+1}]`` is sent affinely into a single edge:
``x ↦ (target, t0 + (t1 - t0)(x - x_k)/(x_{k+1} - x_k))``.  Maps that run
along a walk through several edges are split into such elementary pieces at
construction time, at constant speed.
"""

from bisect import bisect_left, bisect_right

from .errors import InputError
from .metric_graph import GraphPoint, Region
from .rational import Q, fmt, mpq

__all__ = [
    "PLMap",
    "Retraction",
    "evaluate",
    "iterate",
    "image_region",
    "preimage_region",
    "sup_distance",
    "lipschitz_modulus",
    "inverse_modulus",
    "is_surjective",
    "compose",
]

_ZERO = mpq(0)


def _walk_pieces(graph, x0, x1, legs):
    """Split ``[x0, x1]`` proportionally to leg lengths (constant speed)."""
    total = sum((abs(b - a) for _, a, b in legs), _ZERO)
    if total == 0:
        e, a, _ = legs[0]
        return [(x0, x1, e, a, a)]
    out = []
    x = x0
    acc = _ZERO
    span = x1 - x0
    legs = [leg for leg in legs if leg[1] != leg[2]]
    for i, (e, a, b) in enumerate(legs):
        acc += abs(b - a)
        nx = x1 if i == len(legs) - 1 else x0 + span * acc / total
        out.append((x, nx, e, a, b))
        x = nx
    return out


class PLMap:
    """A continuous piecewise-linear self-map of ``graph``.

    Parameters
    ----------
    graph : MetricGraph
    pieces : sequence (one entry per edge) of lists of
        ``(x0, x1, target_edge, t0, t1)`` covering ``[0, L]`` in order.
    check : bool
        Validate coverage, ranges and continuity (default True).
    """

    def __init__(self, graph, pieces, check=True):
        self.graph = graph
        if len(pieces) != len(graph.edges):
            raise InputError("a PL map needs one piece list per edge")
        breaks = []
        segs = []
        for e, plist in enumerate(pieces):
            plist = _simplify([(Q(a), Q(b), te, Q(t0), Q(t1)) for a, b, te, t0, t1 in plist])
            if check:
                self._check_edge(e, plist)
            breaks.append(tuple([plist[0][0]] + [p[1] for p in plist]))
            segs.append(tuple((te, t0, t1) for _, _, te, t0, t1 in plist))
        self._breaks = tuple(breaks)
        self._segs = tuple(segs)
        if check:
            self._check_vertices()

    # -- construction helpers --------------------------------------------
    @classmethod
    def from_legs(cls, graph, layout, check=True):
        """Build from ``layout[e] = [(x0, x1, legs), ...]``.

        ``legs`` is a walk ``[(edge, t_from, t_to), ...]``; the cell is traversed
        along it at constant speed.  A single zero-length leg gives a constant.
        """
        pieces = []
        for e in range(len(graph.edges)):
            plist = []
            for x0, x1, legs in layout[e]:
                legs = [(te, Q(a), Q(b)) for te, a, b in legs]
                plist.extend(_walk_pieces(graph, Q(x0), Q(x1), legs))
            pieces.append(plist)
        return cls(graph, pieces, check=check)

    @classmethod
    def identity(cls, graph):
        return cls(graph, [[(_ZERO, L, e, _ZERO, L)] for e, L in enumerate(graph.lengths)])

    @classmethod
    def constant(cls, graph, p):
        p = graph.check_point(p)
        return cls(graph, [[(_ZERO, L, p.edge, p.offset, p.offset)] for L in graph.lengths])

    def _check_edge(self, e, plist):
        g = self.graph
        L = g.lengths[e]
        if not plist:
            raise InputError(f"edge {e} has no pieces")
        if plist[0][0] != 0 or plist[-1][1] != L:
            raise InputError(f"pieces on edge {e} must cover [0, {fmt(L)}]")
        for k, (a, b, te, t0, t1) in enumerate(plist):
            if not a < b:
                raise InputError(f"empty or reversed cell on edge {e}")
            if k and plist[k - 1][1] != a:
                raise InputError(f"cells on edge {e} are not contiguous")
            if not 0 <= te < len(g.edges):
                raise InputError(f"piece on edge {e} targets invalid edge {te}")
            TL = g.lengths[te]
            if not (0 <= t0 <= TL and 0 <= t1 <= TL):
                raise InputError(f"piece on edge {e} leaves target edge {te}")
            if k:
                _, _, pe, _, pt1 = plist[k - 1]
                if g.point(pe, pt1) != g.point(te, t0):
                    raise InputError(f"discontinuity on edge {e} at x={fmt(a)}")

    def _check_vertices(self):
        g = self.graph
        for w in range(len(g.vertices)):
            imgs = set()
            for eid, end in g.incident[w]:
                te, t0, t1 = self._segs[eid][0 if end == 0 else -1]
                imgs.add(g.point(te, t0 if end == 0 else t1))
            if len(imgs) != 1:
                raise InputError(f"discontinuity at vertex {g.vertices[w]!r}")

    # -- inspection -------------------------------------------------------
    def cells(self, edge):
        """Yield ``(x0, x1, target, t0, t1)`` for each cell of ``edge``."""
        xs = self._breaks[edge]
        for k, (te, t0, t1) in enumerate(self._segs[edge]):
            yield xs[k], xs[k + 1], te, t0, t1

    def breakpoints(self, edge):
        return self._breaks[edge]

    def segment_count(self):
        return sum(len(s) for s in self._segs)

    def __call__(self, p):
        return evaluate(self, p)

    def __eq__(self, other):
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.graph is other.graph and sup_distance(self, other) == 0

    __hash__ = None

    def __repr__(self):
        return f"PLMap({self.segment_count()} cells on {len(self.graph.edges)} edges)"


def _simplify(plist):
    """Merge adjacent collinear cells (same target, same slope, continuous)."""
    out = []
    for a, b, te, t0, t1 in plist:
        if out:
            pa, pb, pte, pt0, pt1 = out[-1]
            if pte == te and pt1 == t0 and pb == a and (pt1 - pt0) * (b - a) == (t1 - t0) * (pb - pa):
                out[-1] = (pa, b, te, pt0, t1)
                continue
        out.append((a, b, te, t0, t1))
    return out


def _cell_index(xs, s):
    k = bisect_right(xs, s) - 1
    last = len(xs) - 2
    return last if k > last else (0 if k < 0 else k)


def evaluate(f, p):
    """Exact image ``f(p)``."""
    e = p.edge
    s = p.offset
    xs = f._breaks[e]
    k = _cell_index(xs, s)
    te, t0, t1 = f._segs[e][k]
    if t0 == t1:
        t = t0
    else:
        x0 = xs[k]
        t = t0 + (t1 - t0) * (s - x0) / (xs[k + 1] - x0)
    return f.graph.point(te, t)


def iterate(f, p, n):
    """Orbit ``[p, f(p), ..., f^n(p)]``."""
    out = [p]
    for _ in range(n):
        p = evaluate(f, p)
        out.append(p)
    return out


def image_region(f, r):
    """Exact image ``f(r)`` of a Region."""
    g = f.graph
    if r.graph is not g:
        raise InputError("region and map live on different graphs")
    raw = []
    for w in r.vertices:
        q = evaluate(f, g._canon[w])
        raw.append((q.edge, q.offset, q.offset, True, True))
    for e in r.edge_ids():
        xs = f._breaks[e]
        segs = f._segs[e]
        m = len(segs)
        for lo, hi, lc, hc in r.intervals(e):
            k = max(0, bisect_right(xs, lo) - 1)
            while k < m and xs[k] <= hi:
                x0, x1 = xs[k], xs[k + 1]
                if lo >= x0:
                    a, ac = lo, lc
                else:
                    a, ac = x0, True
                if hi <= x1:
                    b, bc = hi, hc
                else:
                    b, bc = x1, True
                k += 1
                if a > b or (a == b and not (ac and bc)):
                    continue
                te, t0, t1 = segs[k - 1]
                if t0 == t1:
                    raw.append((te, t0, t0, True, True))
                    continue
                slope = (t1 - t0) / (x1 - x0)
                ta = t0 + slope * (a - x0)
                tb = t0 + slope * (b - x0)
                if ta <= tb:
                    raw.append((te, ta, tb, ac, bc))
                else:
                    raw.append((te, tb, ta, bc, ac))
    return Region.build(g, raw)


def _segment_ranges(f, within):
    """Per edge, the cell indices overlapping ``within`` (None means all)."""
    g = f.graph
    if within is None:
        return {e: range(len(f._segs[e])) for e in range(len(g.edges))}
    out = {}
    for w in within.vertices:
        for eid, end in g.incident[w]:
            idx = 0 if end == 0 else len(f._segs[eid]) - 1
            out.setdefault(eid, set()).add(idx)
    for e in within.edge_ids():
        xs = f._breaks[e]
        m = len(f._segs[e])
        s = out.setdefault(e, set())
        for lo, hi, _, _ in within.intervals(e):
            k0 = max(0, bisect_right(xs, lo) - 1)
            k1 = min(m - 1, bisect_left(xs, hi))
            s.update(range(k0, k1 + 1))
    return {e: sorted(v) for e, v in out.items()}


def preimage_region(f, r, within=None):
    """Exact ``f^{-1}(r)``, optionally intersected with ``within``."""
    g = f.graph
    if r.graph is not g or (within is not None and within.graph is not g):
        raise InputError("region and map live on different graphs")
    raw = []
    rverts = r.vertices
    for e, ks in _segment_ranges(f, within).items():
        xs = f._breaks[e]
        segs = f._segs[e]
        for k in ks:
            te, t0, t1 = segs[k]
            x0, x1 = xs[k], xs[k + 1]
            if t0 == t1:
                if r.contains(g.point(te, t0)):
                    raw.append((e, x0, x1, True, True))
                continue
            inc = t1 > t0
            tmin, tmax = (t0, t1) if inc else (t1, t0)
            scale = (x1 - x0) / (t1 - t0)
            tedge = g.edges[te]
            if tmin == 0 and tedge.u in rverts:
                x = x0 + (0 - t0) * scale
                raw.append((e, x, x, True, True))
            if tmax == tedge.length and tedge.v in rverts:
                x = x0 + (tedge.length - t0) * scale
                raw.append((e, x, x, True, True))
            for lo, hi, lc, hc in r.intervals(te):
                if hi < tmin:
                    continue
                if lo > tmax:
                    break
                if lo >= tmin:
                    a, ac = lo, lc
                else:
                    a, ac = tmin, True
                if hi <= tmax:
                    b, bc = hi, hc
                else:
                    b, bc = tmax, True
                if a > b or (a == b and not (ac and bc)):
                    continue
                xa = x0 + (a - t0) * scale
                xb = x0 + (b - t0) * scale
                if inc:
                    raw.append((e, xa, xb, ac, bc))
                else:
                    raw.append((e, xb, xa, bc, ac))
    out = Region.build(g, raw)
    if within is not None:
        out = out.intersection(within)
    return out


def _cell_max_distance(g, te1, a0, a1, te2, b0, b1):
    """max over λ∈[0,1] of d((te1, a0+(a1-a0)λ), (te2, b0+(b1-b0)λ))."""
    E1, E2 = g.edges[te1], g.edges[te2]
    D = g.dist
    L1, L2 = E1.length, E2.length
    da, db = a1 - a0, b1 - b0
    # each affine term: (value at λ=0, slope in λ)
    terms = [
        (a0 + b0 + D[E1.u][E2.u], da + db),
        (a0 + L2 - b0 + D[E1.u][E2.v], da - db),
        (L1 - a0 + b0 + D[E1.v][E2.u], db - da),
        (L1 + L2 - a0 - b0 + D[E1.v][E2.v], -da - db),
    ]
    same = te1 == te2
    lines = list(terms)
    if same:
        lines += [(a0 - b0, da - db), (b0 - a0, db - da)]

    def value(lam):
        v = min(c + m * lam for c, m in terms)
        if same:
            d = a0 - b0 + (da - db) * lam
            if d < 0:
                d = -d
            if d < v:
                v = d
        return v

    cands = [_ZERO, mpq(1)]
    for i in range(len(lines)):
        ci, mi = lines[i]
        for j in range(i + 1, len(lines)):
            cj, mj = lines[j]
            if mi != mj:
                lam = (cj - ci) / (mi - mj)
                if 0 < lam < 1:
                    cands.append(lam)
    return max(value(lam) for lam in cands)


def sup_distance(f, h):
    """The sup metric ``max_x d(f(x), h(x))``, exact."""
    if f.graph is not h.graph:
        raise InputError("maps live on different graphs")
    g = f.graph
    best = _ZERO
    for e in range(len(g.edges)):
        xf, xh = f._breaks[e], h._breaks[e]
        sf, sh = f._segs[e], h._segs[e]
        xs = sorted(set(xf) | set(xh))
        i = j = 0
        for k in range(len(xs) - 1):
            a, b = xs[k], xs[k + 1]
            while xf[i + 1] <= a:
                i += 1
            while xh[j + 1] <= a:
                j += 1
            te1, p0, p1 = sf[i]
            te2, q0, q1 = sh[j]
            fa = p0 + (p1 - p0) * (a - xf[i]) / (xf[i + 1] - xf[i])
            fb = p0 + (p1 - p0) * (b - xf[i]) / (xf[i + 1] - xf[i])
            ha = q0 + (q1 - q0) * (a - xh[j]) / (xh[j + 1] - xh[j])
            hb = q0 + (q1 - q0) * (b - xh[j]) / (xh[j + 1] - xh[j])
            v = _cell_max_distance(g, te1, fa, fb, te2, ha, hb)
            if v > best:
                best = v
    return best


def lipschitz_modulus(f):
    """Largest absolute cell slope; a Lipschitz constant for the path metric."""
    best = _ZERO
    for e in range(len(f.graph.edges)):
        xs = f._breaks[e]
        for k, (_, t0, t1) in enumerate(f._segs[e]):
            s = abs(t1 - t0) / (xs[k + 1] - xs[k])
            if s > best:
                best = s
    return best


def inverse_modulus(f, xi):
    """A ``γ`` with ``d(x,y) < γ ⇒ d(f(x),f(y)) < ξ``: ``ξ / modulus``.

    Returns ``None`` for constant maps, where every ``γ`` works.
    """
    xi = Q(xi)
    if xi <= 0:
        raise InputError("xi must be positive")
    m = lipschitz_modulus(f)
    if m == 0:
        return None
    return xi / m


def is_surjective(f):
    g = f.graph
    return image_region(f, g.full_region()) == g.full_region()


def compose(outer, inner):
    """The map ``outer ∘ inner``."""
    g = inner.graph
    if outer.graph is not g:
        raise InputError("maps live on different graphs")
    pieces = []
    for e in range(len(g.edges)):
        plist = []
        for x0, x1, te, t0, t1 in inner.cells(e):
            if t0 == t1:
                q = evaluate(outer, g.point(te, t0))
                plist.append((x0, x1, q.edge, q.offset, q.offset))
                continue
            ys = outer._breaks[te]
            osegs = outer._segs[te]
            tmin, tmax = (t0, t1) if t0 < t1 else (t1, t0)
            inner_breaks = list(ys[bisect_right(ys, tmin): bisect_left(ys, tmax)])
            if t0 > t1:
                inner_breaks.reverse()
            ts = [t0] + inner_breaks + [t1]
            scale = (x1 - x0) / (t1 - t0)
            for ta, tb in zip(ts, ts[1:]):
                mid = (ta + tb) / 2
                k = _cell_index(ys, mid)
                oe, o0, o1 = osegs[k]
                y0, y1 = ys[k], ys[k + 1]
                oslope = (o1 - o0) / (y1 - y0)
                va = o0 + oslope * (ta - y0)
                vb = o0 + oslope * (tb - y0)
                xa = x0 + (ta - t0) * scale
                xb = x0 + (tb - t0) * scale
                plist.append((xa, xb, oe, va, vb))
        pieces.append(plist)
    return PLMap(g, pieces, check=False)


class Retraction:
    """A PL retraction ``r`` of the graph onto a closed subgraph region ``G``.

    ``bound`` is a stored upper bound on fiber diameters; validation checks
    idempotence, that ``r`` fixes ``G`` pointwise, that ``r(X) ⊆ G``, and the
    sufficient fiber condition ``2·ρ(r, id) ≤ bound``.
    """

    def __init__(self, r, subgraph, bound, check=True):
        self.map = r
        self.subgraph = subgraph
        self.bound = Q(bound)
        if check:
            self.validate()

    @classmethod
    def identity(cls, graph):
        return cls(PLMap.identity(graph), graph.full_region(), 0)

    @property
    def is_identity(self):
        return sup_distance(self.map, PLMap.identity(self.map.graph)) == 0

    def validate(self):
        r = self.map
        g = r.graph
        if sup_distance(compose(r, r), r) != 0:
            raise InputError("retraction is not idempotent")
        if not image_region(r, g.full_region()).issubset(self.subgraph):
            raise InputError("retraction image leaves the subgraph")
        for w in self.subgraph.vertices:
            p = g._canon[w]
            if evaluate(r, p) != p:
                raise InputError("retraction moves a subgraph vertex")
        for e in self.subgraph.edge_ids():
            for lo, hi, _, _ in self.subgraph.intervals(e):
                for x0, x1, te, t0, t1 in r.cells(e):
                    a, b = max(lo, x0), min(hi, x1)
                    if a >= b:
                        continue
                    for x in (a, b, (a + b) / 2):
                        if evaluate(r, g.point(e, x)) != g.point(e, x):
                            raise InputError("retraction does not fix its subgraph")
        if 2 * sup_distance(r, PLMap.identity(g)) > self.bound:
            raise InputError("retraction fibers exceed the stored diameter bound")

    def __call__(self, p):
        return evaluate(self.map, p)
