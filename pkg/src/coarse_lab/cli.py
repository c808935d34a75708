"""Batch front end.  Every subcommand prints one JSON report.

Exit codes: 0 analysis completed, 1 property violation found (witness in the
report), 2 input or usage error.
"""
from __future__ import annotations

import argparse
import csv
import itertools
import json
import random
import sys
from fractions import Fraction

from . import __version__
from .contraction import (
    ContractingFamily,
    ContractionConstants,
    check_contraction,
    fellow_travel_radius,
)
from .hyperbolicity import four_point_delta, retraction_constants, thin_triangle_delta
from .metric_core import Graph, GraphError, hausdorff_distance, is_quasigeodesic, path_graph
from .product import build_product, lemma_paths, length_ratio_violation
from .stability import EmbeddedSubset, stability_profile
from .torus_mcg import (
    SL2,
    DistanceFormulaConfig,
    Marking,
    Slope,
    SlopeError,
    annular_projection_distance,
    distance_formula_rhs,
    farey_adjacent,
    farey_distance,
    farey_geodesic,
    fit_comparison_constant,
    marking_ball,
    marking_distance,
    marking_neighbors,
    normalizer,
    orbit_projection_bound,
    shadow,
)

SCHEMA = "coarse-lab-report/1"


class UsageError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _load_graph(path: str) -> Graph:
    try:
        g = Graph.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from None
    if not g.is_connected():
        raise UsageError("graph is not connected")
    return g


def _check_vertices(g: Graph, vs):
    for v in vs:
        if not 0 <= v < g.n:
            raise UsageError(f"vertex {v} out of range for a graph on {g.n} vertices")


def _write_csv(path: str | None, header: list[str], rows) -> None:
    if not path:
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# -- subcommands: each returns (inputs, results, flags, violation) -------------

def cmd_hyperbolicity(args):
    g = _load_graph(args.graph)
    rep = thin_triangle_delta(g, args.geodesic_cap)
    results = {"thin_triangles": rep.to_dict(), "four_point_delta": four_point_delta(g),
               "diameter": g.diameter}
    if args.path:
        path = _ints(args.path)
        _check_vertices(g, path)
        results["retraction"] = retraction_constants(g, path).to_dict()
    inputs = {"graph": args.graph, "n": g.n, "geodesic_cap": args.geodesic_cap, "path": args.path}
    return inputs, results, {"lower_bound": rep.lower_bound}, False


def cmd_stability(args):
    g = _load_graph(args.graph)
    subset = _ints(args.subset)
    _check_vertices(g, subset)
    if len(subset) < 2:
        raise UsageError("--subset needs at least two vertices")
    if args.cap is not None:
        far = max(g.d(u, v) for u, v in itertools.combinations(subset, 2))
        if args.cap < far:
            raise UsageError(f"--cap {args.cap} is below the subset diameter {far}")
    prof = stability_profile(EmbeddedSubset(g, tuple(subset)), Fraction(args.L),
                             args.cap, args.count_cap)
    inputs = {"graph": args.graph, "subset": subset, "L": args.L,
              "length_cap": args.cap if args.cap is not None else "4*d+8",
              "count_cap": args.count_cap}
    _write_csv(args.csv, ["u", "v", "R"],
               [(u, v, r) for (u, v), r in sorted(prof.per_pair.items())])
    return inputs, prof.to_dict(), {"lower_bound": prof.lower_bound}, False


def cmd_contraction(args):
    g = _load_graph(args.graph)
    try:
        with open(args.family) as fh:
            fam = ContractingFamily.from_json(g, fh.read())
        k = ContractionConstants(args.a, Fraction(args.b), args.c)
    except (OSError, KeyError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"bad family or constants: {exc}") from None
    check = check_contraction(fam, k)
    results = {"check": check.to_dict()}
    flags = {}
    if args.L is not None:
        ft = fellow_travel_radius(fam, Fraction(args.L), args.cap, args.count_cap)
        results["fellow_travel"] = ft.to_dict()
        flags["lower_bound"] = ft.lower_bound
    inputs = {"graph": args.graph, "family": args.family, "a": args.a, "b": args.b, "c": args.c,
              "L": args.L, "length_cap": args.cap, "count_cap": args.count_cap}
    return inputs, results, flags, not check.passed


def cmd_product_demo(args):
    X = _load_graph(args.x_graph) if args.x_graph else path_graph(args.n)
    Y = _load_graph(args.y_graph) if args.y_graph else path_graph(args.n)
    P = build_product(X, Y)
    z1 = tuple(_ints(args.z1)) if args.z1 else (0, 0)
    z2 = tuple(_ints(args.z2)) if args.z2 else (X.n - 1, Y.n - 1)
    if len(z1) != 2 or len(z2) != 2:
        raise UsageError("--z1/--z2 take two coordinates x,y")
    _check_vertices(X, (z1[0], z2[0]))
    _check_vertices(Y, (z1[1], z2[1]))
    try:
        lp = lemma_paths(P, z1, z2)
    except GraphError as exc:
        raise UsageError(str(exc)) from None
    Z = P.Z
    qa = is_quasigeodesic(Z, lp.gamma_a, 1)
    qb = is_quasigeodesic(Z, lp.gamma_b, 3)
    ratio = length_ratio_violation(Z, lp.gamma_b, 3) if len(set(lp.gamma_b)) == len(lp.gamma_b) else None
    h = hausdorff_distance(Z, lp.gamma_a, lp.gamma_b)
    results = {
        "gamma_a": [list(P.coords(z)) for z in lp.gamma_a],
        "gamma_b": [list(P.coords(z)) for z in lp.gamma_b],
        "gamma_a_ids": list(lp.gamma_a), "gamma_b_ids": list(lp.gamma_b),
        "gamma_a_K1": qa.ok, "gamma_b_K3": qb.ok,
        "gamma_b_length_ratio_violation": ratio,
        "hausdorff": h, "hausdorff_lower_bound": lp.hausdorff_lower_bound,
        "id_rule": "id = x * |Y| + y",
    }
    violation = not (qa.ok and qb.ok and ratio is None and h >= lp.hausdorff_lower_bound)
    inputs = {"n": args.n, "x_graph": args.x_graph, "y_graph": args.y_graph,
              "z1": list(z1), "z2": list(z2)}
    return inputs, results, {}, violation


def cmd_farey(args):
    slopes = [Slope.parse(s) for s in args.slopes]
    if args.op in ("dist", "adj") and len(slopes) != 2:
        raise UsageError(f"farey {args.op} takes two slopes")
    if args.op == "proj" and len(slopes) != 3:
        raise UsageError("farey proj takes alpha beta gamma")
    if args.op == "dist":
        a, b = slopes
        res = {"result": farey_distance(a, b), "geodesic": [str(s) for s in farey_geodesic(a, b)]}
    elif args.op == "adj":
        res = {"result": farey_adjacent(*slopes)}
    else:
        alpha, beta, gamma = slopes
        if alpha in (beta, gamma):
            raise UsageError("curve equals annulus core")
        res = {"result": annular_projection_distance(alpha, beta, gamma),
               "normalizer": normalizer(alpha).entries()}
    return {"op": args.op, "slopes": [str(s) for s in slopes]}, res, {}, False


def cmd_marking(args):
    ms = [Marking.parse(s) for s in args.markings]
    if args.op == "dist":
        if len(ms) != 2:
            raise UsageError("marking dist takes two markings")
        md = marking_distance(ms[0], ms[1], args.cap)
        res = {"result": md.value, "exact": md.exact,
               "shadow_distance": farey_distance(shadow(ms[0]), shadow(ms[1]))}
        flags = {"lower_bound": not md.exact}
    else:
        if len(ms) != 1:
            raise UsageError("marking neighbors takes one marking")
        res = {"result": [str(m) for m in marking_neighbors(ms[0])]}
        flags = {}
    return {"op": args.op, "markings": [str(m) for m in ms], "radius_cap": args.cap}, res, flags, False


def cmd_distance_formula(args):
    cfg = DistanceFormulaConfig(args.A)
    inputs = {"A": args.A, "denominator_bound": args.denominator_bound}
    if args.fit_radius is not None:
        center = Marking.parse(args.markings[0]) if args.markings else Marking(Slope(0, 1), Slope(1, 0))
        ball = sorted(marking_ball(center, args.fit_radius).items(), key=lambda kv: (kv[1], str(kv[0])))
        samples, shadow_bad = [], []
        for m, d in ball:
            rhs = distance_formula_rhs(center, m, cfg, args.denominator_bound).total
            samples.append((d, rhs))
            if farey_distance(shadow(center), shadow(m)) > 4 * d + 4:
                shadow_bad.append(str(m))
        K = fit_comparison_constant(samples)
        _write_csv(args.csv, ["marking", "d_M", "rhs"], [(str(m), d, r) for (m, d), (_, r) in zip(ball, samples)])
        inputs.update(center=str(center), fit_radius=args.fit_radius)
        res = {"pairs": len(samples), "K": K, "shadow_lipschitz_violations": shadow_bad}
        return inputs, res, {}, bool(shadow_bad) or K is None or K > args.k_max
    if len(args.markings) != 2:
        raise UsageError("distance-formula takes two markings (or --fit-radius)")
    m1, m2 = (Marking.parse(s) for s in args.markings)
    terms = distance_formula_rhs(m1, m2, cfg, args.denominator_bound)
    md = marking_distance(m1, m2, args.cap)
    inputs.update(markings=[str(m1), str(m2)], radius_cap=args.cap)
    res = terms.to_dict() | {"marking_distance": md.value, "marking_distance_exact": md.exact}
    return inputs, res, {"truncated": terms.truncated, "lower_bound": not md.exact}, False


def cmd_orbit(args):
    M = SL2.parse(args.matrix)
    mu = Marking.parse(args.marking)
    rep = orbit_projection_bound(M, mu, args.kmax, args.denominator_bound)
    _write_csv(args.csv, ["k", "E_k", "shadow_distance"],
               [(k + 1, e, f) for k, (e, f) in enumerate(zip(rep.E_trace, rep.farey_trace))])
    inputs = {"matrix": M.entries(), "marking": str(mu), "kmax": args.kmax,
              "denominator_bound": args.denominator_bound}
    return inputs, rep.to_dict(), {"truncated": rep.dropped > 0}, False


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="coarse-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized corpora")
    ap.add_argument("--csv", help="also write a plot-ready CSV trace here")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("hyperbolicity")
    p.add_argument("--graph", required=True)
    p.add_argument("--geodesic-cap", type=int, default=1000)
    p.add_argument("--path", help="comma-separated path for retraction constants")
    p.set_defaults(func=cmd_hyperbolicity)

    p = sub.add_parser("stability")
    p.add_argument("--graph", required=True)
    p.add_argument("--subset", required=True)
    p.add_argument("--L", type=Fraction, default=Fraction(3))
    p.add_argument("--cap", type=int, help="length cap (default 4*d+8 per pair)")
    p.add_argument("--count-cap", type=int, default=10_000)
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("contraction")
    p.add_argument("--graph", required=True)
    p.add_argument("--family", required=True, help="JSON: paths, optional projections, endpoints")
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=Fraction, default=Fraction(1))
    p.add_argument("--c", type=int, default=2)
    p.add_argument("--L", type=Fraction)
    p.add_argument("--cap", type=int)
    p.add_argument("--count-cap", type=int, default=10_000)
    p.set_defaults(func=cmd_contraction)

    p = sub.add_parser("product-demo")
    p.add_argument("--n", type=int, default=5, help="use P_n x P_n when no factor graphs given")
    p.add_argument("--x-graph")
    p.add_argument("--y-graph")
    p.add_argument("--z1")
    p.add_argument("--z2")
    p.set_defaults(func=cmd_product_demo)

    p = sub.add_parser("farey")
    p.add_argument("op", choices=["dist", "adj", "proj"])
    p.add_argument("slopes", nargs="+")
    p.set_defaults(func=cmd_farey)

    p = sub.add_parser("marking")
    p.add_argument("op", choices=["dist", "neighbors"])
    p.add_argument("markings", nargs="+")
    p.add_argument("--cap", type=int, default=12)
    p.set_defaults(func=cmd_marking)

    p = sub.add_parser("distance-formula")
    p.add_argument("markings", nargs="*")
    p.add_argument("--A", type=int, default=5)
    p.add_argument("--denominator-bound", type=int, default=200)
    p.add_argument("--cap", type=int, default=12)
    p.add_argument("--fit-radius", type=int, help="fit K over the marking ball of this radius")
    p.add_argument("--k-max", type=int, default=10)
    p.set_defaults(func=cmd_distance_formula)

    p = sub.add_parser("orbit")
    p.add_argument("--matrix", required=True, help="a,b,c,d row-major")
    p.add_argument("--marking", default="(0/1|1/0)")
    p.add_argument("--kmax", type=int, default=8)
    p.add_argument("--denominator-bound", type=int, default=200)
    p.set_defaults(func=cmd_orbit)
    return ap


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    random.seed(args.seed)
    try:
        inputs, results, flags, violation = args.func(args)
    except (UsageError, GraphError, SlopeError, ValueError) as exc:
        print(f"coarse-lab: error: {exc}", file=sys.stderr)
        return 2
    report = {
        "command": args.command,
        "inputs": inputs | {"seed": args.seed},
        "results": results,
        "flags": flags | {"property_violation": violation},
        "version": SCHEMA,
        "package_version": __version__,
    }
    json.dump(report, out, indent=2, sort_keys=True, default=str)
    out.write("\n")
    return 1 if violation else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
