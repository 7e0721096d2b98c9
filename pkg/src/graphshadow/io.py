"""Versioned, line-based text format for graphs, maps, covers, pseudo-orbits and certificates.

Layout (``#`` starts a comment; rationals are written ``p/q``)::

    format graphshadow-system 1
    graph
      vertex NAME
      edge U V LENGTH
    end
    map NAME
      piece E X0 X1 TARGET_EDGE T0 T1
    end
    cover NAME
      member
      interval E ( LO HI ]
      vertex NAME
    end
    orbit NAME map=MAP delta=D
      point E OFFSET
    end
    patterns NAME cover=COVER
      pattern J0 J1 ...
    end
    certificate NAME
      eps 1/4
      ...
    end

Blocks may only reference names defined earlier in the file.
"""

from dataclasses import dataclass, field

from .cover import TautCover
from .errors import FormatError, GraphShadowError
from .genericity import ShadowingCertificate
from .metric_graph import MetricGraph, Region
from .pl_map import PLMap
from .rational import Q, fmt
from .shadowing import PseudoOrbit
from .symbolic import TransitionRelation

__all__ = ["SystemDescription", "dumps", "loads", "save", "load", "FORMAT_TAG", "FORMAT_VERSION"]

FORMAT_TAG = "graphshadow-system"
FORMAT_VERSION = 1


@dataclass
class SystemDescription:
    """A graph with named maps, covers, pseudo-orbits, pattern lists and certificates."""

    graph: object
    maps: dict = field(default_factory=dict)
    covers: dict = field(default_factory=dict)
    orbits: dict = field(default_factory=dict)
    patterns: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def add_certificate(self, name, cert):
        """Store ``cert`` together with the cover and maps it refers to."""
        for table, obj, suffix in ((self.covers, cert.cover, "cover"), (self.maps, cert.source, "source"),
                                   (self.maps, cert.g, "g")):
            if not any(v is obj for v in table.values()):
                table[f"{name}.{suffix}"] = obj
        self.certificates[name] = cert


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------


def _name_of(obj, table, kind):
    for name, value in table.items():
        if value is obj:
            return name
    raise FormatError(f"{kind} is not registered in the description")


def _check_name(name):
    if not name or any(c.isspace() for c in name) or "=" in name:
        raise FormatError(f"invalid name {name!r}")
    return name


def _region_lines(graph, region):
    out = []
    for e in region.edge_ids():
        for lo, hi, lc, hc in region.intervals(e):
            out.append(f"  interval {e} {'[' if lc else '('} {fmt(lo)} {fmt(hi)} {']' if hc else ')'}")
    for w in sorted(region.vertices):
        out.append(f"  vertex {graph.vertices[w]}")
    return out


def dumps(desc):
    """Serialize a :class:`SystemDescription` to text."""
    g = desc.graph
    lines = [f"format {FORMAT_TAG} {FORMAT_VERSION}", "graph"]
    for v in g.vertices:
        lines.append(f"  vertex {_check_name(str(v))}")
    for e in g.edges:
        lines.append(f"  edge {g.vertices[e.u]} {g.vertices[e.v]} {fmt(e.length)}")
    lines.append("end")
    for name, f in desc.maps.items():
        lines.append(f"map {_check_name(name)}")
        for e in range(len(g.edges)):
            for x0, x1, te, t0, t1 in f.cells(e):
                lines.append(f"  piece {e} {fmt(x0)} {fmt(x1)} {te} {fmt(t0)} {fmt(t1)}")
        lines.append("end")
    for name, cover in desc.covers.items():
        lines.append(f"cover {_check_name(name)}")
        for m in cover.members:
            lines.append("  member")
            lines.extend("  " + s for s in _region_lines(g, m))
        lines.append("end")
    for name, po in desc.orbits.items():
        mname = _name_of(po.map, desc.maps, "pseudo-orbit map")
        lines.append(f"orbit {_check_name(name)} map={mname} delta={fmt(po.delta)}")
        for p in po.points:
            lines.append(f"  point {p.edge} {fmt(p.offset)}")
        lines.append("end")
    for name, (cname, pats) in desc.patterns.items():
        lines.append(f"patterns {_check_name(name)} cover={cname}")
        for pat in pats:
            lines.append("  pattern " + " ".join(str(j) for j in pat))
        lines.append("end")
    for name, c in desc.certificates.items():
        lines.append(f"certificate {_check_name(name)}")
        lines.append(f"  eps {fmt(c.eps)}")
        lines.append(f"  n {c.n}")
        lines.append(f"  cover {_name_of(c.cover, desc.covers, 'certificate cover')}")
        lines.append(f"  source {_name_of(c.source, desc.maps, 'certificate source map')}")
        lines.append(f"  map {_name_of(c.g, desc.maps, 'certificate map')}")
        for key in ("gamma", "delta", "tau", "xi", "eta", "lam"):
            lines.append(f"  {key} {fmt(getattr(c, key))}")
        lines.append(f"  seed {c.seed}")
        lines.append(f"  surjective {'true' if c.surjective else 'false'}")
        for i, s in enumerate(c.phi.successors):
            lines.append(f"  phi {i} : " + " ".join(str(j) for j in sorted(s)))
        for p in c.anchors:
            lines.append(f"  anchor {p.edge} {fmt(p.offset)}")
        for entry in c.log:
            lines.append(f"  log {entry}")
        lines.append("end")
    return "\n".join(lines) + "\n"


def save(desc, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(desc))


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------


class _Line:
    __slots__ = ("number", "tokens", "columns", "text")

    def __init__(self, number, text):
        self.number = number
        self.text = text
        self.tokens, self.columns = [], []
        body = text.split("#", 1)[0]
        col = 0
        for part in body.split():
            col = body.index(part, col)
            self.tokens.append(part)
            self.columns.append(col + 1)
            col += len(part)

    def error(self, message, index=None):
        col = self.columns[index] if index is not None and index < len(self.columns) else None
        return FormatError(message, self.number, col)

    def rational(self, index):
        try:
            return Q(self.tokens[index])
        except IndexError:
            raise self.error("missing value") from None
        except GraphShadowError:
            raise self.error(f"not a rational: {self.tokens[index]!r}", index) from None

    def integer(self, index):
        try:
            return int(self.tokens[index])
        except IndexError:
            raise self.error("missing value") from None
        except ValueError:
            raise self.error(f"not an integer: {self.tokens[index]!r}", index) from None

    def expect(self, count):
        if len(self.tokens) != count:
            raise self.error(f"'{self.tokens[0]}' takes {count - 1} fields, got {len(self.tokens) - 1}")

    def options(self, start, keys):
        out = {}
        for i in range(start, len(self.tokens)):
            key, sep, value = self.tokens[i].partition("=")
            if not sep or key not in keys:
                raise self.error(f"unknown field {self.tokens[i]!r}", i)
            out[key] = (value, i)
        missing = [k for k in keys if k not in out]
        if missing:
            raise self.error(f"missing field {missing[0]}=")
        return out


def _block(lines, pos):
    """Lines of the block opened at ``lines[pos]`` and the index after its ``end``."""
    body = []
    i = pos + 1
    while i < len(lines):
        if lines[i].tokens == ["end"]:
            return body, i + 1
        body.append(lines[i])
        i += 1
    raise lines[pos].error(f"block '{lines[pos].tokens[0]}' is not closed with 'end'")


def _parse_graph(head, body):
    vertices, edges = [], []
    for ln in body:
        kw = ln.tokens[0]
        if kw == "vertex":
            ln.expect(2)
            vertices.append(ln.tokens[1])
        elif kw == "edge":
            ln.expect(4)
            length = ln.rational(3)
            if length <= 0:
                raise ln.error(f"edge {len(edges)} has non-positive length", 3)
            for t in (1, 2):
                if ln.tokens[t] not in vertices:
                    raise ln.error(f"unknown vertex {ln.tokens[t]!r}", t)
            edges.append((ln.tokens[1], ln.tokens[2], length))
        else:
            raise ln.error(f"unknown graph field {kw!r}", 0)
    try:
        return MetricGraph(vertices, edges)
    except GraphShadowError as exc:
        raise head.error(str(exc)) from None


def _edge_arg(g, ln, index):
    e = ln.integer(index)
    if not 0 <= e < len(g.edges):
        raise ln.error(f"invalid edge id {e}", index)
    return e


def _offset_arg(g, ln, edge, index):
    t = ln.rational(index)
    L = g.lengths[edge]
    if not 0 <= t <= L:
        raise ln.error(f"offset {fmt(t)} out of range [0, {fmt(L)}] on edge {edge}", index)
    return t


def _parse_map(g, head, body):
    pieces = [[] for _ in g.edges]
    for ln in body:
        if ln.tokens[0] != "piece":
            raise ln.error(f"unknown map field {ln.tokens[0]!r}", 0)
        ln.expect(7)
        e = _edge_arg(g, ln, 1)
        x0, x1 = _offset_arg(g, ln, e, 2), _offset_arg(g, ln, e, 3)
        te = _edge_arg(g, ln, 4)
        t0, t1 = _offset_arg(g, ln, te, 5), _offset_arg(g, ln, te, 6)
        pieces[e].append((x0, x1, te, t0, t1))
    try:
        return PLMap(g, pieces)
    except GraphShadowError as exc:
        raise head.error(str(exc)) from None


def _parse_cover(g, head, body):
    members = []
    raw = None
    for ln in body:
        kw = ln.tokens[0]
        if kw == "member":
            ln.expect(1)
            raw = ([], [])
            members.append(raw)
            continue
        if raw is None:
            raise ln.error("cover data before the first 'member'", 0)
        if kw == "interval":
            ln.expect(6)
            e = _edge_arg(g, ln, 1)
            if ln.tokens[2] not in "([" or ln.tokens[5] not in ")]":
                raise ln.error("interval brackets must be ( or [ and ) or ]", 2)
            lo, hi = _offset_arg(g, ln, e, 3), _offset_arg(g, ln, e, 4)
            if lo > hi:
                raise ln.error("interval bounds out of order", 3)
            raw[0].append((e, lo, hi, ln.tokens[2] == "[", ln.tokens[5] == "]"))
        elif kw == "vertex":
            ln.expect(2)
            if ln.tokens[1] not in g.vertices:
                raise ln.error(f"unknown vertex {ln.tokens[1]!r}", 1)
            raw[1].append(g.vertex_index(ln.tokens[1]))
        else:
            raise ln.error(f"unknown cover field {kw!r}", 0)
    try:
        return TautCover(g, [Region.build(g, ivs, vs) for ivs, vs in members])
    except GraphShadowError as exc:
        raise head.error(str(exc)) from None


def _lookup(table, value, ln, index, kind):
    if value not in table:
        raise ln.error(f"unknown {kind} {value!r}", index)
    return table[value]


def _parse_orbit(desc, head, body):
    g = desc.graph
    opts = head.options(2, ("map", "delta"))
    f = _lookup(desc.maps, opts["map"][0], head, opts["map"][1], "map")
    try:
        delta = Q(opts["delta"][0])
    except GraphShadowError:
        raise head.error("delta is not a rational", opts["delta"][1]) from None
    pts = []
    for ln in body:
        if ln.tokens[0] != "point":
            raise ln.error(f"unknown orbit field {ln.tokens[0]!r}", 0)
        ln.expect(3)
        e = _edge_arg(g, ln, 1)
        pts.append(g.point(e, _offset_arg(g, ln, e, 2)))
    try:
        return PseudoOrbit(tuple(pts), delta, f)
    except GraphShadowError as exc:
        raise head.error(str(exc)) from None


def _parse_patterns(desc, head, body):
    opts = head.options(2, ("cover",))
    cname, idx = opts["cover"]
    cover = _lookup(desc.covers, cname, head, idx, "cover")
    pats = []
    for ln in body:
        if ln.tokens[0] != "pattern" or len(ln.tokens) < 2:
            raise ln.error("expected 'pattern J0 J1 ...'", 0)
        pat = tuple(ln.integer(i) for i in range(1, len(ln.tokens)))
        for i, j in enumerate(pat):
            if not 0 <= j < cover.k:
                raise ln.error(f"pattern index {j} out of range", i + 1)
        pats.append(pat)
    return cname, pats


_CERT_RATIONALS = ("eps", "gamma", "delta", "tau", "xi", "eta", "lam")


def _parse_certificate(desc, head, body):
    g = desc.graph
    vals = {}
    phi = {}
    anchors, log = [], []
    for ln in body:
        kw = ln.tokens[0]
        if kw in _CERT_RATIONALS:
            ln.expect(2)
            vals[kw] = ln.rational(1)
        elif kw in ("n", "seed"):
            ln.expect(2)
            vals[kw] = ln.integer(1)
        elif kw == "surjective":
            ln.expect(2)
            if ln.tokens[1] not in ("true", "false"):
                raise ln.error("surjective must be true or false", 1)
            vals[kw] = ln.tokens[1] == "true"
        elif kw in ("cover", "source", "map"):
            ln.expect(2)
            table = desc.covers if kw == "cover" else desc.maps
            vals[kw] = _lookup(table, ln.tokens[1], ln, 1, "cover" if kw == "cover" else "map")
        elif kw == "phi":
            if len(ln.tokens) < 4 or ln.tokens[2] != ":":
                raise ln.error("expected 'phi I : J ...'", 0)
            phi[ln.integer(1)] = frozenset(ln.integer(t) for t in range(3, len(ln.tokens)))
        elif kw == "anchor":
            ln.expect(3)
            e = _edge_arg(g, ln, 1)
            anchors.append(g.point(e, _offset_arg(g, ln, e, 2)))
        elif kw == "log":
            log.append(ln.text.split("log", 1)[1].strip())
        else:
            raise ln.error(f"unknown certificate field {kw!r}", 0)
    required = _CERT_RATIONALS + ("n", "seed", "surjective", "cover", "source", "map")
    missing = [k for k in required if k not in vals]
    if missing:
        raise head.error(f"certificate is missing field {missing[0]!r}")
    cover = vals["cover"]
    if sorted(phi) != list(range(cover.k)):
        raise head.error("certificate relation must list phi for every member")
    try:
        rel = TransitionRelation(cover.k, tuple(phi[i] for i in range(cover.k)))
    except GraphShadowError as exc:
        raise head.error(str(exc)) from None
    return ShadowingCertificate(
        vals["eps"], vals["n"], cover, vals["source"], vals["map"], vals["gamma"], vals["delta"],
        vals["tau"], vals["xi"], vals["eta"], vals["lam"], rel, tuple(anchors), vals["seed"],
        vals["surjective"], log,
    )


def loads(text):
    """Parse text produced by :func:`dumps` (or written by hand)."""
    lines = [_Line(i + 1, t) for i, t in enumerate(text.splitlines())]
    lines = [ln for ln in lines if ln.tokens]
    if not lines:
        raise FormatError("empty description", 1)
    head = lines[0]
    if head.tokens[:2] != ["format", FORMAT_TAG] or len(head.tokens) != 3:
        raise head.error(f"expected 'format {FORMAT_TAG} {FORMAT_VERSION}'", 0)
    if head.tokens[2] != str(FORMAT_VERSION):
        raise head.error(f"unsupported format version {head.tokens[2]}", 2)
    if len(lines) < 2 or lines[1].tokens != ["graph"]:
        raise (lines[1] if len(lines) > 1 else head).error("the graph block must come first", 0)
    body, pos = _block(lines, 1)
    desc = SystemDescription(_parse_graph(lines[1], body))
    seen = set()
    while pos < len(lines):
        ln = lines[pos]
        kw = ln.tokens[0]
        if kw not in ("map", "cover", "orbit", "patterns", "certificate"):
            raise ln.error(f"unknown block {kw!r}", 0)
        if len(ln.tokens) < 2:
            raise ln.error(f"block '{kw}' needs a name")
        name = ln.tokens[1]
        if (kw, name) in seen:
            raise ln.error(f"duplicate {kw} {name!r}", 1)
        seen.add((kw, name))
        body, pos = _block(lines, pos)
        if kw == "map":
            ln.expect(2)
            desc.maps[name] = _parse_map(desc.graph, ln, body)
        elif kw == "cover":
            ln.expect(2)
            desc.covers[name] = _parse_cover(desc.graph, ln, body)
        elif kw == "orbit":
            desc.orbits[name] = _parse_orbit(desc, ln, body)
        elif kw == "patterns":
            desc.patterns[name] = _parse_patterns(desc, ln, body)
        else:
            ln.expect(2)
            desc.certificates[name] = _parse_certificate(desc, ln, body)
    return desc


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
