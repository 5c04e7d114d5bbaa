"""Command-line front end.

Every subcommand prints a JSON report (schema ``plurirank-report/1``) and
exits with 0 on success, 1 on usage errors, 2 when an input fails validation
and 3 when a checked property is violated.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .currents import (
    DEFAULT_DELTA,
    atomic_write_text,
    dumps_current,
    generate_fibered_family,
    generate_plane_current,
    generate_union_current,
    load_current,
    pushforward_current,
)
from .dimension import correlation_dimension, write_curve_csv
from .errors import PlurirankError
from .genericity import (
    adversarial_kernel,
    certify_exceptional,
    injectivity_montecarlo,
    lemma_ii_montecarlo,
    random_sp_of_rank,
)
from .harness import (
    digest_bytes,
    dumps_report,
    make_report,
    sample_projection,
    singularity_experiment,
    verify_theorem,
)
from .linalg import derive_rng
from .positivity import rank_via_contraction, rank_via_span
from .projective import TOL_CENTER

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_VIOLATION = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _shape(text: str) -> tuple:
    try:
        parts = tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected k,p,ell,r integers, got {text!r}") from None
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected exactly four integers k,p,ell,r")
    return parts


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plurirank", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def report_opts(p, out_is_report=True):
        if out_is_report:
            p.add_argument("-o", "--out", help="write the JSON report here")
        else:
            p.add_argument("--report", help="write the JSON report here")

    gen = sub.add_parser("gen", help="generate a synthetic current")
    gsub = gen.add_subparsers(dest="kind", required=True)
    for kind in ("plane", "union", "fibered"):
        g = gsub.add_parser(kind)
        g.add_argument("--k", type=int, required=True)
        g.add_argument("--p", type=int, required=True)
        g.add_argument("--seed", type=int, required=True)
        g.add_argument("-o", "--out", required=True, help="dataset path")
        report_opts(g, out_is_report=False)
        if kind in ("plane", "union"):
            g.add_argument("--n", type=int, required=True)
        if kind == "union":
            g.add_argument("--m", type=int, default=2)
        if kind == "fibered":
            g.add_argument("--ell", type=int, required=True)
            g.add_argument("--n-fibers", type=int, required=True)
            g.add_argument("--per-fiber", type=int, required=True)

    proj = sub.add_parser("project", help="push a current forward under a random projection")
    proj.add_argument("--in", dest="input", required=True)
    proj.add_argument("--ell", type=int, required=True)
    proj.add_argument("--seed", type=int, required=True)
    proj.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    proj.add_argument("--tol-center", type=float, default=TOL_CENTER)
    proj.add_argument("-o", "--out", required=True, help="dataset path for the pushed current")
    report_opts(proj, out_is_report=False)

    rank = sub.add_parser("rank", help="per-atom ranks by both algorithms")
    rank.add_argument("--in", dest="input", required=True)
    report_opts(rank)

    dim = sub.add_parser("dim", help="correlation dimension of the trace measure")
    dim.add_argument("--in", dest="input", required=True)
    dim.add_argument("--seed", type=int, required=True)
    dim.add_argument("--q-lo", type=float, default=0.05)
    dim.add_argument("--q-hi", type=float, default=0.25)
    dim.add_argument("--csv", help="write the (r, C(r)) curve here")
    report_opts(dim)

    ver = sub.add_parser("verify", help="check the rank/dimension bound end to end")
    ver.add_argument("--in", dest="input", required=True)
    ver.add_argument("--seed", type=int, required=True)
    ver.add_argument("--q-lo", type=float, default=0.05)
    ver.add_argument("--q-hi", type=float, default=0.25)
    ver.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    ver.add_argument("--tol-center", type=float, default=TOL_CENTER)
    ver.add_argument("--trials", type=int, default=20)
    report_opts(ver)

    gen_ = sub.add_parser("genericity", help="Monte Carlo rank preservation under Haar kernels")
    gen_.add_argument("--shape", type=_shape, required=True, help="dimV,p,ell,r")
    gen_.add_argument("--trials", type=int, default=10_000)
    gen_.add_argument("--adversarial", type=int, default=100, help="random vectors to certify")
    gen_.add_argument("--seed", type=int, required=True)
    report_opts(gen_)

    sing = sub.add_parser("singularity", help="dimension of projected trace clouds")
    sing.add_argument("--in", dest="input", required=True)
    sing.add_argument("--ell", type=int, required=True)
    sing.add_argument("--trials", type=int, default=50)
    sing.add_argument("--seed", type=int, required=True)
    sing.add_argument("--q-lo", type=float, default=0.05)
    sing.add_argument("--q-hi", type=float, default=0.25)
    sing.add_argument("--tol-center", type=float, default=TOL_CENTER)
    report_opts(sing)
    return parser


def _params_digest(args, data: bytes = b"") -> str:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "report", "csv", "input")}
    return digest_bytes(data, json.dumps(params, sort_keys=True, default=list).encode())


def _read_input(path):
    data = Path(path).read_bytes()
    return load_current(path), data


def _cmd_gen(args):
    if args.kind == "plane":
        T = generate_plane_current(args.k, args.p, args.n, args.seed)
    elif args.kind == "union":
        T = generate_union_current(args.k, args.p, args.m, args.n, args.seed)
    else:
        T = generate_fibered_family(args.k, args.p, args.ell, args.n_fibers, args.per_fiber, args.seed).current
    text = dumps_current(T)
    atomic_write_text(args.out, text)
    metrics = {"k": T.k, "p": T.p, "atoms": len(T), "mass": T.mass, "dataset_sha256": digest_bytes(text.encode())}
    return make_report(f"gen {args.kind}", _params_digest(args), args.seed, metrics, [])


def _cmd_project(args):
    T, data = _read_input(args.input)
    pi, resamples = sample_projection(T, args.ell, [args.seed], args.tol_center)
    res = pushforward_current(T, pi, args.delta, args.tol_center)
    text = dumps_current(res.current)
    atomic_write_text(args.out, text)
    metrics = {
        "ell": pi.ell,
        "projection_resamples": resamples,
        "clusters": len(res.clusters),
        "output_atoms": len(res.current),
        "degenerate_clusters": list(res.degenerate),
        "input_mass": T.mass,
        "output_mass": res.current.mass,
        "dataset_sha256": digest_bytes(text.encode()),
    }
    return make_report("project", _params_digest(args, data), args.seed, metrics, [])


def _cmd_rank(args):
    T, data = _read_input(args.input)
    span = [rank_via_span(a.t) for a in T.atoms]
    contr = [rank_via_contraction(a.t) for a in T.atoms]
    mismatch = [i for i, (a, b) in enumerate(zip(span, contr)) if a != b]
    hist = {}
    for r in span:
        hist[str(r)] = hist.get(str(r), 0) + 1
    metrics = {"atoms": len(T), "rank_histogram": dict(sorted(hist.items())), "ranks": span}
    violations = [f"rank algorithms disagree on atoms {mismatch}"] if mismatch else []
    return make_report("rank", _params_digest(args, data), None, metrics, violations)


def _cmd_dim(args):
    T, data = _read_input(args.input)
    est = correlation_dimension(T.points, T.weights, args.q_lo, args.q_hi, seed=args.seed)
    if args.csv:
        write_curve_csv(est, args.csv)
    return make_report("dim", _params_digest(args, data), args.seed, est.as_dict(), [])


def _cmd_verify(args):
    T, data = _read_input(args.input)
    rep = verify_theorem(
        T,
        args.seed,
        q_lo=args.q_lo,
        q_hi=args.q_hi,
        delta=args.delta,
        tol_center=args.tol_center,
        trials=args.trials,
    )
    return make_report("verify", _params_digest(args, data), args.seed, rep.as_dict(), rep.violations())


def _cmd_genericity(args):
    dim_v, p, ell, r = args.shape
    lem = lemma_ii_montecarlo(dim_v, p, ell, r, args.trials, args.seed)
    inj = injectivity_montecarlo(dim_v, p, ell, args.trials, args.seed)
    L = np.eye(dim_v, dtype=complex)[:, :ell]
    routes = {"rank_drop": 0, "injectivity": 0, "none": 0}
    for n in range(args.adversarial):
        t = random_sp_of_rank(dim_v, p, r, derive_rng(args.seed, 4, n))
        ks = adversarial_kernel(t, ell, L, seed=[args.seed, 5, n])
        routes[certify_exceptional(t, ks.K, L) or "none"] += 1
    violations = []
    if lem.failures:
        violations.append(f"rank dropped below ell in Haar trials {lem.failure_indices[:20]}")
    if inj.failures:
        violations.append(f"injectivity failed in Haar trials {inj.failure_indices[:20]}")
    if routes["none"]:
        violations.append(f"{routes['none']} adversarial kernels were not certified")
    metrics = {
        "shape": {"dimV": dim_v, "p": p, "ell": ell, "r": r},
        "lemma_ii": {"trials": lem.trials, "failures": lem.failures, "failure_indices": lem.failure_indices},
        "injectivity": {"trials": inj.trials, "failures": inj.failures, "failure_indices": inj.failure_indices},
        "adversarial": {"vectors": args.adversarial, "certified_by": routes},
    }
    return make_report("genericity", _params_digest(args), args.seed, metrics, violations)


def _cmd_singularity(args):
    T, data = _read_input(args.input)
    metrics = singularity_experiment(
        T.points, T.weights, args.ell, args.trials, args.seed,
        q_lo=args.q_lo, q_hi=args.q_hi, tol_center=args.tol_center,
    )
    return make_report("singularity", _params_digest(args, data), args.seed, metrics, [])


COMMANDS = {
    "gen": _cmd_gen,
    "project": _cmd_project,
    "rank": _cmd_rank,
    "dim": _cmd_dim,
    "verify": _cmd_verify,
    "genericity": _cmd_genericity,
    "singularity": _cmd_singularity,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except (PlurirankError, OSError) as exc:
        print(f"plurirank {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = dumps_report(report)
    target = getattr(args, "report", None) if args.command in ("gen", "project") else getattr(args, "out", None)
    if target:
        atomic_write_text(target, text)
    sys.stdout.write(text)
    return EXIT_VIOLATION if report["violations"] else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
