"""Built-in test systems: graphs and PL maps used by tests, docs and the CLI."""

from .metric_graph import MetricGraph
from .pl_map import PLMap
from .rational import Q

__all__ = [
    "interval_graph",
    "circle_graph",
    "y_tree",
    "interval_map",
    "circle_map",
    "tent",
    "identity_interval",
    "logistic_like",
    "circle_doubling",
    "circle_rotation_like",
    "y_fold",
    "builtin_system",
    "BUILTIN_SYSTEMS",
]


def interval_graph(length=1):
    return MetricGraph(["0", "1"], [("0", "1", Q(length))])


def circle_graph(circumference=1):
    """Circle as two edges ``a→b`` and ``b→a``; arc coordinate θ runs along edge 0 then edge 1."""
    half = Q(circumference) / 2
    return MetricGraph(["a", "b"], [("a", "b", half), ("b", "a", half)])


def y_tree(arm=1):
    arm = Q(arm)
    return MetricGraph(["hub", "l0", "l1", "l2"], [("hub", "l0", arm), ("hub", "l1", arm), ("hub", "l2", arm)])


def interval_map(graph, points):
    """PL self-map of a one-edge graph through the nodes ``[(x, y), ...]``."""
    pts = [(Q(x), Q(y)) for x, y in points]
    layout = [[(x0, x1, [(0, y0, y1)]) for (x0, y0), (x1, y1) in zip(pts, pts[1:])]]
    return PLMap.from_legs(graph, layout)


def _circle_walk(half, y0, y1):
    """Legs of the constant-speed walk between lift values ``y0`` and ``y1``."""
    if y0 == y1:
        k = y0 // half
        return [(int(k) % 2, y0 - k * half, y0 - k * half)]
    lo, hi = min(y0, y1), max(y0, y1)
    m = lo // half + 1
    marks = []
    while m * half < hi:
        marks.append(m * half)
        m += 1
    ys = [y0] + (marks if y1 > y0 else marks[::-1]) + [y1]
    legs = []
    for p, q in zip(ys, ys[1:]):
        k = min(p, q) // half
        legs.append((int(k) % 2, p - k * half, q - k * half))
    return legs


def circle_map(graph, lift_points):
    """PL circle map from nodes ``[(θ, F(θ)), ...]`` of a lift, θ spanning [0, C].

    ``F`` may take any real values; images wrap modulo the circumference.
    """
    half = graph.lengths[0]
    pts = [(Q(x), Q(y)) for x, y in lift_points]
    layout = [[], []]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        # split the domain cell at the vertex θ = half
        cuts = [x0, x1]
        if x0 < half < x1:
            cuts = [x0, half, x1]
        for a, b in zip(cuts, cuts[1:]):
            ya = y0 + (y1 - y0) * (a - x0) / (x1 - x0)
            yb = y0 + (y1 - y0) * (b - x0) / (x1 - x0)
            e = 0 if b <= half else 1
            off = 0 if e == 0 else half
            legs = _circle_walk(half, ya, yb)
            layout[e].append((a - off, b - off, legs))
    return PLMap.from_legs(graph, layout)


def _scaled(g, nodes):
    L = g.lengths[0]
    return [(Q(x) * L, Q(y) * L) for x, y in nodes]


def tent(graph=None):
    g = graph or interval_graph()
    return g, interval_map(g, _scaled(g, [(0, 0), ("1/2", 1), (1, 0)]))


def identity_interval(graph=None):
    g = graph or interval_graph()
    return g, PLMap.identity(g)


def logistic_like(graph=None):
    """PL interpolation of ``4x(1-x)`` at quarters."""
    g = graph or interval_graph()
    return g, interval_map(g, _scaled(g, [(0, 0), ("1/4", "3/4"), ("1/2", 1), ("3/4", "3/4"), (1, 0)]))


def circle_doubling(graph=None):
    g = graph or circle_graph()
    C = 2 * g.lengths[0]
    return g, circle_map(g, [(0, 0), (C, 2 * C)])


def circle_rotation_like(graph=None):
    """Degree-one PL circle map: rotation by 1/5 with unequal slopes on the halves."""
    g = graph or circle_graph()
    C = 2 * g.lengths[0]
    return g, circle_map(g, [(0, C / 5), (C / 2, C * 4 / 5), (C, C * 6 / 5)])


def y_fold(graph=None):
    """Y-tree map: arm 0 folds onto arm 1, arm 1 → arm 2, arm 2 → arm 0."""
    g = graph or y_tree()
    a = g.lengths[0]
    layout = [
        [(0, a / 2, [(1, 0, a)]), (a / 2, a, [(1, a, 0)])],
        [(0, a, [(2, 0, a)])],
        [(0, a, [(0, 0, a)])],
    ]
    return g, PLMap.from_legs(g, layout)


BUILTIN_SYSTEMS = {
    "tent": tent,
    "identity": identity_interval,
    "logistic": logistic_like,
    "doubling": circle_doubling,
    "rotation": circle_rotation_like,
    "yfold": y_fold,
}


def builtin_system(name):
    """``(graph, map)`` for one of :data:`BUILTIN_SYSTEMS`."""
    try:
        return BUILTIN_SYSTEMS[name]()
    except KeyError:
        from .errors import InputError

        raise InputError(f"unknown built-in system {name!r}; choose from {sorted(BUILTIN_SYSTEMS)}") from None
