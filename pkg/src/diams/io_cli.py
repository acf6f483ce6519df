"""Curve-pair files, report serialization and the command-line surface.

Curve pairs are JSON objects

    {"alpha_offset": int, "alpha": [[x, y, z], ...],
     "beta_offset": int, "beta": [[x, y, z], ...]}

and reports are JSON with sorted keys and %.17g floats, so identical
inputs produce byte-identical output.  Quads are keyed by doubled integers
[2u+1, 2v+1] so vertices [2u, 2v], edges and quads share one integer key
space.
"""

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import (DegenerateDirection, DegenerateMetric,
                     DegenerateOrientation, InadmissibleVertex, IoFailure,
                     NonGenericCell, NonGenericChain, ParseError,
                     ValidationError)
from .net_core import (ConormalNet, PolyCurve, integrate_net,
                       validate_generic_position)
from .singularity import (Configuration, admissibility_check, analyze_net,
                          metric_field, singular_edges, singular_vertices)
from .smooth_oracle import (BUILTIN_PAIRS, builtin_pair, find_swallowtails,
                            omega_smooth, trace_singular_curve)
from .surface_mesh import export_obj, tessellate

DEFAULT_TOL = 1e-9
DEFAULT_METRIC_EPS = 1e-9


# ---------------------------------------------------------------------------
# deterministic JSON
# ---------------------------------------------------------------------------

def _dump(obj):
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if x != x or x in (float("inf"), float("-inf")):
            return "null"
        return "%.17g" % x
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(f"{json.dumps(k)}:{_dump(v)}" for k, v in items) + "}"
    if isinstance(obj, (list, tuple)) or isinstance(obj, np.ndarray):
        return "[" + ",".join(_dump(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_report(report):
    """Serialize a report dict to deterministic JSON bytes."""
    return (_dump(report) + "\n").encode("ascii")


# ---------------------------------------------------------------------------
# curve-pair files
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CurvePairFile:
    alpha_offset: int
    beta_offset: int
    alpha: np.ndarray
    beta: np.ndarray

    def to_net(self, nu_eps=1e-12):
        return ConormalNet(PolyCurve(self.alpha, offset=self.alpha_offset),
                           PolyCurve(self.beta, offset=self.beta_offset),
                           nu_eps=nu_eps)


def _check_points(name, raw):
    if not isinstance(raw, list):
        raise ValidationError(f"{name} must be a list of [x, y, z] triples")
    if len(raw) < 3:
        raise ValidationError(f"{name} needs at least 3 points, got {len(raw)}")
    for i, p in enumerate(raw):
        if (not isinstance(p, list)) or len(p) != 3:
            raise ValidationError(f"{name}[{i}] is not an [x, y, z] triple")
        for c in p:
            if not isinstance(c, (int, float)) or isinstance(c, bool):
                raise ValidationError(f"{name}[{i}] has a non-numeric entry")
    pts = np.asarray(raw, dtype=np.float64)
    if not np.all(np.isfinite(pts)):
        bad = int(np.argwhere(~np.isfinite(pts).all(axis=1))[0, 0])
        raise ValidationError(f"{name}[{bad}] has a non-finite coordinate")
    same = np.all(pts[1:] == pts[:-1], axis=1)
    if same.any():
        bad = int(np.argmax(same))
        raise ValidationError(
            f"{name}[{bad}] and {name}[{bad + 1}] are duplicate consecutive points")
    return pts


def parse_curves(data):
    """Parse curve-pair bytes; offsets default to 0."""
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("top-level JSON value must be an object")
    for key in ("alpha", "beta"):
        if key not in doc:
            raise ValidationError(f"missing curve {key!r}")
    for key in ("alpha_offset", "beta_offset"):
        if key in doc and not isinstance(doc[key], int):
            raise ValidationError(f"{key} must be an integer")
    return CurvePairFile(
        alpha_offset=int(doc.get("alpha_offset", 0)),
        beta_offset=int(doc.get("beta_offset", 0)),
        alpha=_check_points("alpha", doc["alpha"]),
        beta=_check_points("beta", doc["beta"]))


def write_curves(cpf):
    doc = {
        "alpha_offset": cpf.alpha_offset,
        "alpha": [[float(c) for c in p] for p in cpf.alpha],
        "beta_offset": cpf.beta_offset,
        "beta": [[float(c) for c in p] for p in cpf.beta],
    }
    return (_dump(doc) + "\n").encode("ascii")


def example_curve_pair(y, du=0.1, dv=0.1):
    """The worked three-point curve pair with one singular vertex at the
    origin; y selects the configuration (-1/2: A, -2: B, 1: C)."""
    a0 = np.array([0.0, 0.0, 1.0])
    alpha = np.stack([a0 + np.array([-1.0, -1.0, 1.0]) * du,
                      a0,
                      a0 + np.array([1.0, 0.0, 0.0]) * du])
    beta = np.stack([np.array([-1.0, y, 0.0]) * dv,
                     np.array([0.0, 0.0, 0.0]),
                     np.array([2.0, 1.0, 0.0]) * dv])
    return CurvePairFile(alpha_offset=-1, beta_offset=-1,
                         alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------

def _quad_key(quad):
    return [2 * quad[0] + 1, 2 * quad[1] + 1]


def _edge_dict(edge):
    return {"axis": edge.axis, "base_vertex": [edge.u, edge.v]}


def report_from_analysis(analysis, tol, metric_eps, degenerate_quads=()):
    metric = analysis.metric
    omega = [{"quad": _quad_key(q), "value": w} for q, w in metric.items()] \
        if metric is not None else []
    vertices = []
    for sv in analysis.vertices:
        vertices.append({
            "vertex": list(sv.vertex),
            "configuration": (sv.configuration.value
                              if sv.configuration is not None else None),
            "kind": sv.kind.value,
            "diagnostics": dict(sv.diagnostics),
        })
    polylines = [{
        "closed": pl.closed,
        "vertices": [list(v) for v in pl.vertices],
        "edges": [_edge_dict(e) for e in pl.edges],
    } for pl in analysis.polylines]
    return {
        "smooth": False,
        "tolerances": {"sign_tol": tol, "degenerate_metric_eps": metric_eps,
                       "scale": analysis.net.scale},
        "omega": omega,
        "singular_edges": [_edge_dict(se.edge) for se in analysis.edges],
        "vertices": vertices,
        "polylines": polylines,
        "validations": {
            "generic_position": [
                {"vertex": list(g.vertex), "planes": [g.plane_a, g.plane_b]}
                for g in analysis.generic_violations],
            "admissibility": [
                {"vertex": list(v), "reason": reason}
                for v, reason in analysis.admissibility_violations],
            "degenerate_quads": list(degenerate_quads),
        },
    }


def report_from_oracle(pair_name, grid_n, tol, chains, points):
    return {
        "smooth": True,
        "pair": pair_name,
        "grid_n": grid_n,
        "tolerances": {"trace_tol": tol},
        "omega": [],
        "singular_edges": [],
        "vertices": [{
            "vertex": [p.u, p.v],
            "configuration": None,
            "kind": p.kind,
            "lambda": p.lam,
            "dvdu": p.dvdu,
        } for p in points],
        "polylines": [{
            "closed": bool(c.closed),
            "vertices": [[float(u), float(v)] for u, v in c.points],
            "edges": [],
        } for c in chains],
        "validations": {"generic_position": [], "admissibility": [],
                        "degenerate_quads": []},
    }


# ---------------------------------------------------------------------------
# command-line interface
# ---------------------------------------------------------------------------

def _read(path):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e


def _write(path, data):
    try:
        with open(path, "wb") as fh:
            fh.write(data)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def _cmd_analyze(args):
    cpf = parse_curves(_read(args.curves))
    net = cpf.to_net()
    try:
        analysis = analyze_net(net, tol=args.tol, eps_degenerate=args.metric_eps)
    except DegenerateMetric as e:
        quad = getattr(e, "quad", None)
        report = {
            "smooth": False,
            "tolerances": {"sign_tol": args.tol,
                           "degenerate_metric_eps": args.metric_eps,
                           "scale": net.scale},
            "omega": [], "singular_edges": [], "vertices": [], "polylines": [],
            "validations": {"generic_position": [], "admissibility": [],
                            "degenerate_quads": [{
                                "quad": _quad_key(quad) if quad else None,
                                "detail": str(e)}]},
        }
        _write(args.report, write_report(report))
        raise
    _write(args.report, write_report(
        report_from_analysis(analysis, args.tol, args.metric_eps)))
    if not analysis.clean:
        for g in analysis.generic_violations:
            print(f"generic position: {g.describe()}", file=sys.stderr)
        for v, reason in analysis.admissibility_violations:
            print(f"admissibility: vertex {v}: {reason}", file=sys.stderr)
        return 1
    return 0


def _cmd_validate(args):
    cpf = parse_curves(_read(args.curves))
    net = cpf.to_net()
    failures = 0
    for g in validate_generic_position(net, args.tol):
        print(f"generic position: {g.describe()}", file=sys.stderr)
        failures += 1
    metric = metric_field(net, args.metric_eps)   # raises DegenerateMetric
    edges = singular_edges(metric)
    for sv in singular_vertices(edges, net.domain):
        if sv.configuration == Configuration.INADMISSIBLE:
            print(f"admissibility: vertex {sv.vertex}: "
                  f"{len(sv.incident_singular_edges)} incident singular edges",
                  file=sys.stderr)
            failures += 1
        elif (net.domain.is_interior_vertex(*sv.vertex)
              and not admissibility_check(net, sv, args.tol)):
            print(f"admissibility: vertex {sv.vertex}: forbidden quadrant "
                  "configuration", file=sys.stderr)
            failures += 1
    if failures:
        return 1
    print(f"ok: {net.domain.nu}x{net.domain.nv} vertices, "
          f"{len(edges)} singular edges")
    return 0


def _cmd_mesh(args):
    if args.subdiv < 1:
        print("error: --subdiv must be a positive integer", file=sys.stderr)
        return 2
    cpf = parse_curves(_read(args.curves))
    net = cpf.to_net()
    if args.singular == "auto":
        analysis = analyze_net(net, tol=args.tol,
                               eps_degenerate=args.metric_eps)
        if not analysis.clean:
            for v, reason in analysis.admissibility_violations:
                print(f"admissibility: vertex {v}: {reason}", file=sys.stderr)
            for g in analysis.generic_violations:
                print(f"generic position: {g.describe()}", file=sys.stderr)
            return 1
        f = analysis.f
        chains = analysis.polylines
    else:
        f = integrate_net(net)
        chains = []
    mesh = tessellate(f, args.subdiv, chains)
    export_obj(mesh, args.out)
    return 0


def _cmd_example(args):
    cpf = example_curve_pair(args.y, args.du, args.dv)
    _write(args.out, write_curves(cpf))
    return 0


def _cmd_oracle(args):
    pair = builtin_pair(args.pair)
    if args.tol is not None:
        tol = args.tol
    else:
        us = np.linspace(*pair.u_range, 17)
        vs = np.linspace(*pair.v_range, 17)
        wmax = max(abs(omega_smooth(pair, u, v)) for u in us for v in vs)
        tol = 1e-10 * max(1.0, wmax)
    chains = trace_singular_curve(pair, args.grid, tol)
    points = []
    for chain in chains:
        points.extend(find_swallowtails(pair, chain))
    _write(args.report, write_report(
        report_from_oracle(args.pair, args.grid, tol, chains, points)))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="diams",
        description="Discrete indefinite affine minimal surfaces: build, "
                    "classify singularities, mesh.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="detect and classify singularities")
    p.add_argument("--curves", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--metric-eps", type=float, default=DEFAULT_METRIC_EPS)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("mesh", help="tessellate the bilinear patches to OBJ")
    p.add_argument("--curves", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--subdiv", type=int, required=True)
    p.add_argument("--singular", choices=("auto", "none"), default="auto")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--metric-eps", type=float, default=DEFAULT_METRIC_EPS)
    p.set_defaults(func=_cmd_mesh)

    p = sub.add_parser("validate", help="check a curve pair without analyzing")
    p.add_argument("--curves", required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--metric-eps", type=float, default=DEFAULT_METRIC_EPS)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("example", help="emit the three-point worked curve pair")
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--du", type=float, default=0.1)
    p.add_argument("--dv", type=float, default=0.1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("oracle", help="trace the smooth singular curve")
    p.add_argument("--pair", choices=BUILTIN_PAIRS, required=True)
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--report", required=True)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=_cmd_oracle)
    return parser


def run_cli(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args)
    except (ParseError, IoFailure) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValidationError, InadmissibleVertex) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (DegenerateMetric, DegenerateOrientation, DegenerateDirection,
            NonGenericCell, NonGenericChain) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


def main():
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
