"""Command line entry point: ``phasebounds <command> ...``.

Exit codes: 0 success, 2 validation error, 3 inconclusive certification,
64 usage error.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .bounds import global_upper_bounds, local_bounds
from .frames import generate_frame
from .geometry import geodesic
from .io import (
    DocumentError,
    doc_to_frame,
    doc_to_matrix,
    frame_to_doc,
    matrix_to_doc,
    path_to_doc,
    read_json,
    write_json,
)
from .quotient import PsdPoint, distance
from .search import SearchConfig, certify, estimate_b0

EXIT_OK, EXIT_INVALID, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 2, 3, 64


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise UsageError(message)


def _emit(report, out=None):
    text = write_json(out, report)
    if out in (None, "-"):
        sys.stdout.write(text)


def _header(command, **config):
    return {"version": __version__, "command": command, "config": config}


def cmd_gen_frame(args):
    F = generate_frame(args.type, args.n, args.m, seed=args.seed, r=args.r)
    _emit(frame_to_doc(F), args.output)
    return EXIT_OK


def cmd_dist(args):
    x = doc_to_matrix(read_json(args.x))
    y = doc_to_matrix(read_json(args.y))
    report = _header("dist", metric=args.metric)
    report["distance"] = distance(x, y, args.metric)
    _emit(report)
    return EXIT_OK


def cmd_analyze(args):
    F = doc_to_frame(read_json(args.frame))
    z = doc_to_matrix(read_json(args.z))
    if not np.any(z):
        raise ValueError("z must be nonzero")
    if z.shape[0] != F.dim_n:
        raise ValueError(f"z has {z.shape[0]} rows, frame acts on C^{F.dim_n}")
    b = local_bounds(F, z)
    report = _header("analyze", psd_frame=F.is_psd)
    report["local_bounds"] = {
        "rank": b.rank,
        "a_z": b.a_z,
        "ahat_z": b.ahat_z,
        "ahat1_z": b.ahat1_z,
        "ahat2_z": b.ahat2_z,
        "sandwich": list(b.sandwich),
    }
    if F.is_psd:
        report["local_bounds"]["A1hat_z"] = b.A1hat_z
        report["local_bounds"]["A2hat_z"] = b.A2hat_z
    _emit(report)
    return EXIT_OK


def _config(args):
    return SearchConfig(
        starts=args.starts,
        max_iters=args.max_iters,
        seed=args.seed,
        tol=args.tol,
        n_check=args.n_check,
        threads=args.threads,
    )


def cmd_certify(args):
    F = doc_to_frame(read_json(args.frame))
    cfg = _config(args)
    c = certify(F, cfg)
    report = _header(
        "certify",
        seed=cfg.seed,
        starts=cfg.starts,
        max_iters=cfg.max_iters,
        tol=cfg.tol,
        grad_tol=cfg.grad_tol,
        n_check=cfg.n_check,
        retraction=cfg.retraction,
    )
    report["certificate"] = {
        "verdict": c.verdict,
        "a0_estimate": c.a0_estimate,
        "bracket": list(c.bracket),
        "null_tol": c.null_tol,
        "scale": c.scale,
        "checks_agree": c.checks_agree,
        "condition_checks": [
            {"ii": k.ii, "iii": k.iii, "iv": k.iv, "v": k.v, "qz_min": k.qz_min, "qhat_nullity": k.qhat_nullity}
            for k in c.condition_checks
        ],
        "iterations": {"a0": c.a0_search.total_iterations, "bracket": c.bracket_search.total_iterations},
        "witness_U": matrix_to_doc(c.witness_U),
    }
    if c.collision is not None:
        report["certificate"]["collision"] = {
            "x": matrix_to_doc(c.collision.x),
            "y": matrix_to_doc(c.collision.y),
            "beta_gap": c.collision.beta_gap,
            "diff_norm": c.collision.diff_norm,
        }
    _emit(report)
    return EXIT_INCONCLUSIVE if c.verdict == "inconclusive" else EXIT_OK


def cmd_geodesic(args):
    A = PsdPoint.from_matrix(doc_to_matrix(read_json(args.A)))
    B = PsdPoint.from_matrix(doc_to_matrix(read_json(args.B)))
    if args.samples < 2:
        raise ValueError("samples must be at least 2")
    path = geodesic(A, B, np.linspace(0.0, 1.0, args.samples))
    doc = _header("geodesic", samples=args.samples)
    doc["path"] = path_to_doc(path)
    _emit(doc, args.output)
    return EXIT_OK


def cmd_upper(args):
    F = doc_to_frame(read_json(args.frame))
    cfg = _config(args)
    g = global_upper_bounds(F, starts=cfg.starts, seed=cfg.seed)
    b0 = estimate_b0(F, cfg)
    report = _header("upper", seed=cfg.seed, starts=cfg.starts, max_iters=cfg.max_iters)
    report["upper"] = {"b0": b0.value, "b01": g["b01"], "B0": g["B0"], "psd_frame": F.is_psd}
    _emit(report)
    return EXIT_OK


def _search_flags(p):
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--n-check", type=int, default=8)


def build_parser():
    p = Parser(prog="phasebounds", description="Stability bounds for generalized phase retrieval.")
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--threads", type=int, default=None, help="worker threads for multistart searches")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    g = sub.add_parser("gen-frame", help="generate a frame document")
    g.add_argument("--type", required=True, choices=["pauli", "random-hermitian", "random-rank1"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--r", type=int, default=1)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", default=None)
    g.set_defaults(func=cmd_gen_frame)

    d = sub.add_parser("dist", help="quotient distance between two matrices")
    d.add_argument("--metric", choices=["d", "D", "Dprime"], default="D")
    d.add_argument("x")
    d.add_argument("y")
    d.set_defaults(func=cmd_dist)

    a = sub.add_parser("analyze", help="local Lipschitz bounds at z")
    a.add_argument("--frame", required=True)
    a.add_argument("--z", required=True)
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("certify", help="phase-retrievability certificate")
    c.add_argument("--frame", required=True)
    _search_flags(c)
    c.set_defaults(func=cmd_certify)

    q = sub.add_parser("geodesic", help="sample a Bures-Wasserstein geodesic")
    q.add_argument("--A", required=True)
    q.add_argument("--B", required=True)
    q.add_argument("--samples", type=int, default=11)
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=cmd_geodesic)

    u = sub.add_parser("upper", help="global upper bounds b0, b01, B0")
    u.add_argument("--frame", required=True)
    _search_flags(u)
    u.set_defaults(func=cmd_upper)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError:
        return EXIT_USAGE
    if args.threads is not None and args.threads < 1:
        sys.stderr.write("phasebounds: error: --threads must be positive\n")
        return EXIT_INVALID
    try:
        return args.func(args)
    except (DocumentError, ValueError) as e:
        sys.stderr.write(f"phasebounds: error: {e}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
