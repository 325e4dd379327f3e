"""Command-line interface: ``occultist [--scene FILE] GROUP COMMAND ...``.

Exit status: 0 Holds (or success), 1 Fails, 2 Indeterminate or
non-certificate, 3 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from ..bass_serre import (
    cc_hypothesis_check,
    divergence_report,
    expand_tree,
    verify_hypotheses,
    verify_tree_conclusions,
)
from ..errors import OccultistError, UnknownCommand
from ..gallery import (
    FlagPair,
    assemble_free_product_scene,
    in_thickened,
    pd_cone_body,
    soifer_transversality,
    sym_coords,
    sym_dim,
    sym_square,
    thickened_pd_body,
    triangle_flags,
    triangle_scene,
)
from ..occultation import FULL, WEAK, occultation_check
from ..projgeom import ProjPoint, hilbert_distance, make_body
from ..ratlin import RMat, to_rat
from .plot import Chart, layout, to_csv, to_svg
from .report import emit_report, exit_code, occult_json, replay_report, report, rs
from .scene_io import parse_scene, scene_to_doc, write_scene

ERROR_EXIT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UnknownCommand(message)


def _common(default):
    """Global options, accepted before or after the subcommand."""
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--scene", help="scene JSON file", default=None if default else argparse.SUPPRESS)
    p.add_argument("--format", choices=["json", "text"], default="json" if default else argparse.SUPPRESS)
    p.add_argument("--output", help="write the report here instead of stdout",
                   default=None if default else argparse.SUPPRESS)
    return p


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="occultist", description="Exact occultation and combination certificates.",
                parents=[_common(True)])
    common = _common(False)
    groups = p.add_subparsers(dest="group", required=True, parser_class=_Parser)

    occ = groups.add_parser("occult", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    chk = occ.add_parser("check", parents=[common], help="occultation check of bodies A B C")
    chk.add_argument("a")
    chk.add_argument("b")
    chk.add_argument("c")
    chk.add_argument("--weak", action="store_true")
    rep = occ.add_parser("replay", parents=[common], help="re-verify every LP certificate in a JSON report")
    rep.add_argument("report")

    tree = groups.add_parser("tree", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    tb = tree.add_parser("build", parents=[common])
    tb.add_argument("--depth", type=int, required=True)
    tb.add_argument("--budget", type=int, default=5000)

    comb = groups.add_parser("combine", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    cv = comb.add_parser("verify", parents=[common])
    cv.add_argument("--cc", action="store_true")
    cv.add_argument("--weak", action="store_true")

    hil = groups.add_parser("hilbert", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    hd = hil.add_parser("dist", parents=[common])
    hd.add_argument("body", help="body name, or 'simplex'")
    hd.add_argument("x", help="point name or comma-separated rationals")
    hd.add_argument("y")

    dv = groups.add_parser("diverge", parents=[common])
    dv.add_argument("--max-len", type=int, required=True)
    dv.add_argument("--budget", type=int, default=200000)

    ex = groups.add_parser("example", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    er = ex.add_parser("run", parents=[common])
    er.add_argument("name", choices=["triangle", "pd-cone", "soifer", "free-product"])
    er.add_argument("--d", type=int, default=3, help="dimension for soifer")
    er.add_argument("--window", type=int, default=6, help="orbit window for soifer")
    ee = ex.add_parser("emit", parents=[common], help="write a gallery scene file")
    ee.add_argument("name", choices=["triangle", "free-product", "three-boxes"])
    ee.add_argument("--out", required=True)

    pl = groups.add_parser("plot", parents=[common]).add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    pe = pl.add_parser("emit", parents=[common])
    pe.add_argument("--chart", required=True, help="chart covector, e.g. 1,1,1")
    pe.add_argument("--out", required=True, help="FILE.svg or FILE.csv")
    pe.add_argument("--depth", type=int, help="draw the tree truncation of this depth")
    return p


def _vec(text):
    return tuple(to_rat(x.strip()) for x in text.split(","))


def _need_scene(args):
    if not args.scene:
        raise UnknownCommand("this command needs --scene FILE")
    return parse_scene(args.scene)


def _body(scene, name):
    if name not in scene.bodies:
        raise UnknownCommand(f"unknown body {name!r}")
    return scene.bodies[name]


def _point(scene, text):
    if scene is not None and text in scene.points:
        return scene.points[text].rep
    return _vec(text)


def cmd_occult_check(args):
    scene = _need_scene(args)
    cert = occultation_check(_body(scene, args.a), _body(scene, args.b), _body(scene, args.c),
                             WEAK if args.weak else FULL)
    body = occult_json(cert)
    verdict = body.pop("verdict")
    return report("occult check", verdict, bodies=[args.a, args.b, args.c], **body)


def cmd_occult_replay(args):
    with open(args.report, encoding="utf-8") as fh:
        doc = json.load(fh)
    checked, failed = replay_report(doc)
    return report("occult replay", "Holds" if failed == 0 else "Fails", checked=checked, failed=failed)


def _tree_json(t):
    return {
        "nodes": [{"index": i, "vertex": n.vertex, "parent": n.parent, "depth": n.depth,
                   "word": [list(w) for w in n.word], "generators": [rs(g) for g in n.body.generators]}
                  for i, n in enumerate(t.nodes)],
        "edges": [[i, j, e] for i, j, e in t.edges],
    }


def cmd_tree_build(args):
    scene = _need_scene(args)
    t = expand_tree(scene.gog, args.depth, args.budget)
    conc = verify_tree_conclusions(t, raise_on_violation=False)
    verdict = "Holds" if conc.holds else "Fails"
    if conc.holds and t.windowed:
        verdict = "Indeterminate"
    return report("tree build", verdict, depth=args.depth, node_count=len(t.nodes),
                  pair_checks=conc.pair_checks, edge_pair_checks=conc.edge_pair_checks, chart=conc.chart,
                  violations=[[str(x) for x in v] for v in conc.violations], tree=_tree_json(t))


def _hyp_json(rep):
    return {
        "verdict": rep.verdict,
        "complete": rep.complete,
        "notes": rep.notes,
        "items": [{"vertex": i.vertex, "e": i.e, "e2": i.e2, "gamma": i.gamma, "certificate": occult_json(i.certificate)}
                  for i in rep.items],
        "confinements": [{"holds": c.holds, "n": c.n, "stages": c.stages, "failed_stage": c.failed_stage}
                         for c in rep.confinements],
    }


def cmd_combine_verify(args):
    scene = _need_scene(args)
    if scene.gog is None:
        raise UnknownCommand("scene has no graph_of_groups")
    mode = WEAK if args.weak else FULL
    if args.cc:
        cc = cc_hypothesis_check(scene.gog, mode)
        verdict = "Holds" if cc.item1 == "certified" else ("Indeterminate" if "Indeterminate" in
                                                            (cc.omega.verdict, cc.interior.verdict) else "Fails")
        return report("combine verify --cc", verdict, item1=cc.item1, item3=cc.item3,
                      omega=_hyp_json(cc.omega), interior=_hyp_json(cc.interior),
                      bisaturated=cc.bisaturated, nonideal_boundary_strictly_convex=cc.strictly_convex)
    rep = verify_hypotheses(scene.gog, mode)
    return report("combine verify", rep.verdict, **{k: v for k, v in _hyp_json(rep).items() if k != "verdict"})


def cmd_hilbert(args):
    scene = parse_scene(args.scene) if args.scene else None
    x = _point(scene, args.x)
    y = _point(scene, args.y)
    if args.body == "simplex" and (scene is None or "simplex" not in scene.bodies):
        n = len(x)
        body = make_body([tuple(1 if i == j else 0 for j in range(n)) for i in range(n)])
    else:
        if scene is None:
            raise UnknownCommand("body names need --scene FILE")
        body = _body(scene, args.body)
    cr, dist = hilbert_distance(body, x, y)
    return report("hilbert dist", None, cross_ratio=rs(cr), distance=repr(dist))


def cmd_diverge(args):
    scene = _need_scene(args)
    t = divergence_report(scene.gog, args.max_len, args.budget)
    return report("diverge", None, rows=[{"length": r.length, "count": r.count, "min_log_ratio": repr(r.min_log_ratio),
                                          "min_distance_to_identity": repr(r.min_distance_to_identity)} for r in t.rows],
                  strictly_increasing=t.strictly_increasing, identity_hits=len(t.identity_hits),
                  collisions=t.collisions)


def _example_triangle(args):
    s = triangle_scene()
    flags = triangle_flags(s)
    return report("example run triangle", "Holds" if all(flags.values()) else "Fails", flags=flags)


def _example_pd(args):
    checks = {}
    pd = pd_cone_body(2, 4)
    ident = sym_coords(RMat.identity(2))
    checks["identity_inside_inner"] = pd.inner.contains(ident, open_=True, either_sign=False)
    checks["identity_inside_outer"] = pd.outer.contains(ident, open_=True, either_sign=False)
    checks["sandwich_certified"] = pd.certified()
    checks["n_2"] = sym_dim(2) == 3
    checks["n_3"] = sym_dim(3) == 6
    g = RMat([[2, 1], [1, 1]])
    s = sym_square(g)
    checks["rank_one_preserved"] = all(pd.outer.contains(tuple(s @ v), either_sign=False) for v in pd.inner.generators)
    th = thickened_pd_body(2, 5)
    for t in (Fraction(1, 2), Fraction(2)):
        v = ident + (t,)
        exact = in_thickened(RMat.identity(2), t)
        checks[f"thick_I_t={t}"] = (th.inner.contains(v, either_sign=False) == exact
                                    and th.outer.contains(v, either_sign=False) == exact)
    return report("example run pd-cone", "Holds" if all(checks.values()) else "Fails", checks=checks)


def _example_soifer(args):
    fp = soifer_transversality(args.d, args.window)
    ok = FlagPair.from_json(fp.to_json()).replay()
    return report("example run soifer", "Holds" if ok and fp.margin > 0 else "Fails", flag=fp.to_json(),
                  margin_float=float(fp.margin), replayed=ok)


def _example_free_product(args):
    s = assemble_free_product_scene()
    hyp = verify_hypotheses(s.gog)
    t = expand_tree(s.gog, 4)
    conc = verify_tree_conclusions(t, raise_on_violation=False)
    div = divergence_report(s.gog, 5)
    ok = hyp.verdict == "Holds" and conc.holds and div.strictly_increasing and not div.identity_hits
    return report("example run free-product", "Holds" if ok else "Fails", N=s.metadata["N"],
                  hypotheses=hyp.verdict, hypothesis_triples=len(hyp.items), tree_nodes=len(t.nodes),
                  tree_conclusions=conc.holds, divergence_increasing=div.strictly_increasing,
                  min_log_ratio=[repr(r.min_log_ratio) for r in div.rows])


EXAMPLES = {"triangle": _example_triangle, "pd-cone": _example_pd, "soifer": _example_soifer,
            "free-product": _example_free_product}


def three_boxes_scene():
    """Aligned unit-height boxes: the tangent line y = 0 defeats full occultation."""
    from ..gallery import Scene

    boxes = {"A": [(0, 0, 1), (2, 0, 1), (2, 1, 1), (0, 1, 1)],
             "B": [(1, 0, 1), (3, 0, 1), (3, 1, 1), (1, 1, 1)],
             "C": [(2, 0, 1), (4, 0, 1), (4, 1, 1), (2, 1, 1)]}
    return Scene(3, {k: make_body(v) for k, v in boxes.items()}, metadata={"name": "three-boxes"})


def cmd_example_emit(args):
    if args.name == "triangle":
        s = triangle_scene()
    elif args.name == "free-product":
        s = assemble_free_product_scene()
    else:
        s = three_boxes_scene()
    write_scene(s, args.out)
    return report("example emit", None, name=args.name, out=args.out)


def cmd_plot(args):
    scene = _need_scene(args)
    chart = Chart(_vec(args.chart))
    if args.depth is not None:
        if scene.gog is None:
            raise UnknownCommand("--depth needs a graph_of_groups")
        t = expand_tree(scene.gog, args.depth)
        named = [(f"n{i}", n.body) for i, n in enumerate(t.nodes)]
        links = [(f"n{i}", f"n{j}") for i, j, _ in t.edges]
    else:
        named = sorted(scene.bodies.items())
        links = []
    polys, segs = layout(chart, named, links)
    if args.out.endswith(".svg"):
        text = to_svg(polys, segs)
    elif args.out.endswith(".csv"):
        text = to_csv(polys, segs)
    else:
        raise UnknownCommand("--out must end in .svg or .csv")
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return report("plot emit", None, out=args.out, polygons=len(polys), edges=len(segs))


def run_command(args):
    """Dispatch parsed arguments; returns (report, exit status)."""
    key = (args.group, getattr(args, "cmd", None))
    table = {
        ("occult", "check"): cmd_occult_check,
        ("occult", "replay"): cmd_occult_replay,
        ("tree", "build"): cmd_tree_build,
        ("combine", "verify"): cmd_combine_verify,
        ("hilbert", "dist"): cmd_hilbert,
        ("diverge", None): cmd_diverge,
        ("example", "emit"): cmd_example_emit,
        ("plot", "emit"): cmd_plot,
    }
    if key == ("example", "run"):
        rep = EXAMPLES[args.name](args)
    elif key in table:
        rep = table[key](args)
    else:
        raise UnknownCommand(" ".join(str(k) for k in key if k))
    return rep, exit_code(rep["verdict"])


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        rep, status = run_command(args)
    except (OccultistError, ValueError, ZeroDivisionError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ERROR_EXIT
    data = emit_report(rep, args.format)
    if args.output:
        with open(args.output, "wb") as fh:
            fh.write(data)
    else:
        try:
            sys.stdout.write(data.decode())
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); silence the flush at exit
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return status


__all__ = ["main", "build_parser", "run_command", "parse_scene", "scene_to_doc", "emit_report"]
