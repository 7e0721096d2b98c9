"""Command-line entry point.

Exit status: 0 success or verified, 1 property refuted, 2 usage or construction error.
Relative ``--out`` paths are resolved against ``$GRAPHSHADOW_OUTPUT_DIR`` when set.
"""

import argparse
import os
import random
import sys

from .cover import build_taut_cover, lebesgue_number
from .errors import GraphShadowError, InputError
from .genericity import certify_perturbation, verify_ball
from .io import SystemDescription, dumps, load
from .metric_graph import graph_distance
from .pl_map import evaluate, sup_distance
from .rational import Q, fmt
from .shadowing import check_shadowing, generate_pseudo_orbit, grid_oracle, realize_pattern
from .symbolic import compute_transition
from .systems import BUILTIN_SYSTEMS, builtin_system

OUTPUT_DIR_ENV = "GRAPHSHADOW_OUTPUT_DIR"


def _out_path(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        os.makedirs(base, exist_ok=True)
        return os.path.join(base, path)
    return path


def _write(path, text):
    with open(_out_path(path), "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(args, lines):
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if getattr(args, "out", None):
        _write(args.out, text)


def _system(args):
    """Description selected by ``--system FILE`` or ``--example NAME`` (map named ``f``)."""
    if args.system:
        return load(args.system)
    graph, f = builtin_system(args.example)
    return SystemDescription(graph, maps={"f": f})


def _pick(table, name, kind):
    if name is None:
        if len(table) != 1:
            raise InputError(f"choose a {kind} with --{kind} ({', '.join(table) or 'none stored'})")
        return next(iter(table.items()))
    if name not in table:
        raise InputError(f"unknown {kind} {name!r}")
    return name, table[name]


def _cover(args, desc, f):
    if getattr(args, "cover", None) or (desc.covers and args.eps is None):
        return _pick(desc.covers, getattr(args, "cover", None), "cover")[1]
    if args.eps is None:
        raise InputError("need --eps to build a cover (or a stored --cover)")
    return build_taut_cover(desc.graph, f, args.eps)


def cmd_example(args):
    graph, f = builtin_system(args.name)
    text = dumps(SystemDescription(graph, maps={"f": f}))
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_gen_cover(args):
    desc = _system(args)
    _, f = _pick(desc.maps, args.map, "map")
    cover = build_taut_cover(desc.graph, f, args.eps)
    desc.covers[args.name] = cover
    lines = [f"cover {args.name}", f"members {cover.k}", f"lebesgue {fmt(lebesgue_number(cover))}",
             f"max-diameter {fmt(max(cover.diameters))}"]
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        _write(args.out, dumps(desc))
    return 0


def cmd_transition(args):
    desc = _system(args)
    _, f = _pick(desc.maps, args.map, "map")
    rel = compute_transition(f, _cover(args, desc, f))
    _emit(args, rel.adjacency_text().splitlines())
    return 0


def cmd_check_shadowing(args):
    desc = _system(args)
    if args.orbit:
        _, po = _pick(desc.orbits, args.orbit, "orbit")
        f = po.map
    else:
        _, f = _pick(desc.maps, args.map, "map")
        if args.delta is None:
            raise InputError("need --delta (or a stored --orbit)")
        po = generate_pseudo_orbit(f, args.delta, args.length, args.strategy, seed=args.seed)
    verdict = check_shadowing(f, po, args.eps)
    lines = [f"verdict {'SHADOWED' if verdict.shadowed else 'NOT-SHADOWED'}", f"eps {fmt(args.eps)}",
             f"delta {fmt(po.delta)}", f"length {len(po)}", f"strategy {args.strategy}", f"seed {args.seed}"]
    if verdict.shadowed:
        z = verdict.witness
        lines.append(f"witness {z.edge} {fmt(z.offset)}")
        if args.table:
            lines.append("step pseudo_edge pseudo_offset shadow_edge shadow_offset distance")
            q = z
            for i, x in enumerate(po.points):
                lines.append(f"{i} {x.edge} {fmt(x.offset)} {q.edge} {fmt(q.offset)} {fmt(graph_distance(f.graph, x, q))}")
                q = evaluate(f, q)
    elif args.table:
        lines.append("step pseudo_edge pseudo_offset")
        lines.extend(f"{i} {x.edge} {fmt(x.offset)}" for i, x in enumerate(po.points))
    _emit(args, lines)
    return 0 if verdict.shadowed else 1


def cmd_certify(args):
    desc = _system(args)
    _, f = _pick(desc.maps, args.map, "map")
    if args.eps is None or args.n is None:
        raise InputError("certify needs --eps and --n")
    cert = certify_perturbation(f, args.eps, args.n, surjective=args.surjective, seed=args.seed)
    desc.add_certificate(args.name, cert)
    lines = [f"certificate {args.name}", f"eps {fmt(cert.eps)}", f"n {cert.n}", f"members {cert.cover.k}",
             f"gamma {fmt(cert.gamma)}", f"delta {fmt(cert.delta)}",
             f"sup-distance {fmt(sup_distance(cert.g, f))}", f"surjective {str(cert.surjective).lower()}"]
    sys.stdout.write("\n".join(lines) + "\n")
    _write(args.out or f"{args.name}.gsys", dumps(desc))
    return 0


def cmd_verify_ball(args):
    desc = load(args.system) if args.system else None
    if desc is None:
        raise InputError("verify-ball needs --system with a stored certificate")
    _, cert = _pick(desc.certificates, args.certificate, "certificate")
    seed = cert.seed if args.seed is None else args.seed
    report = verify_ball(cert, samples=args.samples, orbits=args.orbits, length=args.length,
                         seed=seed, workers=args.workers)
    _emit(args, report.lines())
    return 0 if report.verified else 1


def _random_patterns(rel, count, length, rng):
    """Half relation walks, half unconstrained index sequences."""
    out = []
    for t in range(count):
        pat = [rng.randrange(rel.k)]
        for _ in range(length - 1):
            pool = sorted(rel[pat[-1]]) if t % 2 == 0 else range(rel.k)
            pat.append(rng.choice(list(pool)))
        out.append(tuple(pat))
    return out


def cmd_oracle_compare(args):
    desc = _system(args)
    _, f = _pick(desc.maps, args.map, "map")
    if args.patterns:
        cname, pats = _pick(desc.patterns, args.patterns, "patterns")[1]
        cover = desc.covers[cname]
    else:
        cover = _cover(args, desc, f)
        rel = compute_transition(f, cover)
        pats = _random_patterns(rel, args.samples, args.length, random.Random(args.seed))
    agree = explained = unexplained = 0
    details = []
    for idx, pat in enumerate(pats):
        exact = realize_pattern(f, cover, pat).realized
        oracle = grid_oracle(f, cover, pat, args.resolution)
        if exact == oracle.realized:
            agree += 1
        elif oracle.realized and realize_pattern(f, cover, pat, widen=oracle.widths).realized:
            explained += 1
        else:
            unexplained += 1
            details.append(f"disagreement pattern={idx} exact={exact} oracle={oracle.realized} "
                           + " ".join(map(str, pat)))
    lines = [f"verdict {'AGREE' if unexplained == 0 else 'DISAGREE'}", f"patterns {len(pats)}",
             f"resolution {args.resolution}", f"agree {agree}", f"explained {explained}",
             f"unexplained {unexplained}"] + details
    _emit(args, lines)
    return 0 if unexplained == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="graphshadow", description="Exact shadowing experiments on metric graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, eps_required=False):
        src = p.add_mutually_exclusive_group()
        src.add_argument("--system", help="system description file")
        src.add_argument("--example", default="tent", choices=sorted(BUILTIN_SYSTEMS), help="built-in system")
        p.add_argument("--map", help="map name inside the description")
        p.add_argument("--eps", type=Q, required=eps_required, help="tolerance (rational, e.g. 2/5)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output file")

    p = sub.add_parser("example", help="write a built-in system description")
    p.add_argument("name", choices=sorted(BUILTIN_SYSTEMS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_example)

    p = sub.add_parser("gen-cover", help="build a taut cover and store it")
    common(p, eps_required=True)
    p.add_argument("--name", default="cover")
    p.set_defaults(func=cmd_gen_cover)

    p = sub.add_parser("transition", help="print the cover transition relation")
    common(p)
    p.add_argument("--cover")
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("check-shadowing", help="exact finite-horizon shadowing of a pseudo-orbit")
    common(p, eps_required=True)
    p.add_argument("--orbit", help="stored pseudo-orbit name")
    p.add_argument("--delta", type=Q)
    p.add_argument("--length", type=int, default=50)
    p.add_argument("--strategy", default="random", choices=("random", "drift"))
    p.add_argument("--table", action="store_true", help="emit per-step distances")
    p.set_defaults(func=cmd_check_shadowing)

    p = sub.add_parser("certify", help="build a shadowing certificate")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--surjective", action="store_true")
    p.add_argument("--name", default="cert")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("verify-ball", help="sample the certified ball and test the claims")
    p.add_argument("--system", required=True)
    p.add_argument("--certificate")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--orbits", type=int, default=20)
    p.add_argument("--length", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify_ball)

    p = sub.add_parser("oracle-compare", help="compare exact realization with the grid oracle")
    common(p)
    p.add_argument("--cover")
    p.add_argument("--patterns", help="stored pattern list name")
    p.add_argument("--resolution", type=int, default=4096)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--length", type=int, default=5)
    p.set_defaults(func=cmd_oracle_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphShadowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
