"""Command-line front end.

JSON goes to stdout and artifacts (CSV, SVG, reports) to files.  Exit codes:
0 success or verdict true, 1 verdict false, 2 I/O, parse or usage error,
3 dimension mismatch.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .config import TOL
from .linalg import DimensionError, fro_norm, is_hermitian

EXIT_OK, EXIT_FALSE, EXIT_IO, EXIT_DIM = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flag values detected after argparse (reported with exit code 2)."""


def _emit(obj) -> None:
    from .io import dumps_json

    sys.stdout.write(dumps_json(obj) + "\n")


def _config(args, **extra) -> dict:
    tol = TOL.with_feas(args.tol_feas) if getattr(args, "tol_feas", None) is not None else TOL
    cfg = {
        "command": args.command + (f" {args.sub}" if getattr(args, "sub", None) else ""),
        "seed": getattr(args, "seed", None),
        "tolerances": {"exact": tol.exact, "nilp": tol.nilp, "feas": tol.feas},
    }
    if getattr(args, "group", None) is not None:
        cfg["group"] = args.group
    cfg.update(extra)
    return cfg


def _tol(args):
    return TOL.with_feas(args.tol_feas) if args.tol_feas is not None else TOL


def _load(path):
    from .io import load_matrix

    return load_matrix(path)


def _group(text):
    from .groups import parse_group

    return parse_group(text)


def _write_artifacts(args, pts) -> dict:
    from .geometry import convex_hull, write_svg
    from .io import write_cloud_csv

    files = {}
    if args.out:
        write_cloud_csv(args.out, pts)
        files["csv"] = args.out
    if args.svg:
        write_svg(args.svg, pts, convex_hull(pts))
        files["svg"] = args.svg
    return files


# ---------------------------------------------------------------- commands


def cmd_range(args) -> int:
    from .demos import summarize
    from .numrange import sample_range

    c, a, spec = _load(args.C), _load(args.A), _group(args.group)
    cloud = sample_range(c, a, spec, args.samples, args.seed)
    out = {"config": _config(args, samples=args.samples), "summary": summarize(cloud, args.grid)}
    out["files"] = _write_artifacts(args, cloud.points)
    _emit(out)
    return EXIT_OK


def cmd_radius(args) -> int:
    from .groups import FullUnitary, SpecialUnitary
    from .io import matrix_to_json
    from .numrange import hermitian_interval, radius

    c, a, spec = _load(args.C), _load(args.A), _group(args.group)
    res = radius(c, a, spec, restarts=args.restarts, seed=args.seed)
    out = {
        "config": _config(args, restarts=args.restarts),
        "value": res.value,
        "converged": res.converged,
        "restarts": res.restarts,
        "maximizer": matrix_to_json(res.maximizer),
        "kind": "estimate",
    }
    herm = is_hermitian(c, TOL.exact * max(1.0, fro_norm(c))) and is_hermitian(a, TOL.exact * max(1.0, fro_norm(a)))
    if herm and isinstance(spec, (FullUnitary, SpecialUnitary)):
        lo, hi = hermitian_interval(c, a)
        out["exact"] = {"interval": [lo, hi], "radius": max(abs(lo), abs(hi))}
    _emit(out)
    return EXIT_OK


def cmd_symmetry(args) -> int:
    from .groups import FullUnitary, Local, SpecialUnitary
    from .local import tloc_feasibility
    from .symmetry import blockshift_canonical, detect_weak_symmetry

    a, spec = _load(args.A), _group(args.group)
    tol = _tol(args)
    out = {"config": _config(args)}
    if args.tloc:
        if not isinstance(spec, Local):
            raise UsageError("--tloc needs a loc(n) group")
        res = tloc_feasibility(a, spec.n)
        verdict = res.feasible
        out["tloc"] = {
            "feasible": res.feasible,
            "mu": None if res.mu is None else [str(x) for x in res.mu],
            "lambda": None if res.lam is None else [str(x) for x in res.lam],
            "phi": str(res.phi),
            "kind": "exact",
        }
    else:
        cert = detect_weak_symmetry(a, spec, tol.feas, torus=args.torus)
        verdict = cert.verdict
        out["certificate"] = cert.to_dict()
        if isinstance(spec, (FullUnitary, SpecialUnitary)) and (verdict or args.blockshift):
            bs = blockshift_canonical(a, tol.feas)
            out["blockshift"] = {"found": bs.found}
            if bs.found:
                from .io import matrix_to_json

                out["blockshift"]["partition"] = list(bs.partition.sizes)
                out["blockshift"]["U"] = matrix_to_json(bs.U)
    out["verdict"] = verdict
    _emit(out)
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_local_classify(args) -> int:
    from .local import classify_4x4

    a = _load(args.A)
    res = classify_4x4(a, restarts=args.restarts, seed=args.seed, tol=_tol(args).feas)
    _emit({"config": _config(args, restarts=args.restarts), "report": res.to_dict()})
    return EXIT_OK if res.found else EXIT_FALSE


def _conjecture_table(n: int, trials: int, seed: int) -> list[dict]:
    from .local import case_labels, conjecture_check, random_etloc

    rng = np.random.default_rng(seed)
    if n == 2:
        cases = [(str(lab), lab.instance(rng)) for lab in case_labels()]
    else:
        cases = [(f"trial {k}", random_etloc(n, rng)) for k in range(trials)]
    return [_row(name, a, n, conjecture_check(a, n)) for name, a in cases]


def _row(name, a, n, res) -> dict:
    from .local import tloc_feasibility

    row = {"instance": name, "found": res.found, "searched": res.searched}
    if res.found:
        row["partition"] = list(res.partition.sizes)
        row["involves_out"] = res.involves_out
        row["P"] = np.rint(res.P.real).astype(int).tolist()
    else:
        # counterexample report: the support (1-based) and the exact torus witness
        k, l = np.nonzero(np.abs(a) > TOL.exact * max(1.0, fro_norm(a)))
        row["support"] = [[int(i) + 1, int(j) + 1] for i, j in zip(k, l)]
        row["mu"] = [str(x) for x in tloc_feasibility(a, n).mu]
    return row


def cmd_local_conjecture(args) -> int:
    from .io import dumps_json

    if args.n not in (2, 3):
        raise UsageError(f"conjecture check supports n = 2 (exhaustive) or n = 3 (sampled), got {args.n}")
    rows = _conjecture_table(args.n, args.trials, args.seed)
    found = sum(r["found"] for r in rows)
    out = {
        "config": _config(args, n=args.n, trials=args.trials if args.n == 3 else None),
        "mode": "exhaustive" if args.n == 2 else "planted-sampling",
        "witnesses": found,
        "instances": len(rows),
    }
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(dumps_json(rows) + "\n")
        out["files"] = {"table": args.out}
    else:
        out["table"] = rows
    _emit(out)
    return EXIT_OK if found == len(rows) else EXIT_FALSE


def cmd_example(args) -> int:
    from .demos import example, example5_data, example_cloud, summarize

    k = args.number
    if k in (1, 2, 3):
        cloud = example_cloud(k, args.samples, args.seed)
        out = {"config": _config(args, example=k, samples=cloud.meta.get("samples", cloud.count)),
               "summary": summarize(cloud, args.grid)}
        out["files"] = _write_artifacts(args, cloud.points)
        _emit(out)
        return EXIT_OK
    if k == 4:
        from .groups import parse_group
        from .local import classify_4x4
        from .symmetry import blockshift_canonical, detect_weak_symmetry

        ex = example(4)
        loc = detect_weak_symmetry(ex.a, parse_group("loc(2)"))
        full = detect_weak_symmetry(ex.a, parse_group("u(4)"))
        bs = blockshift_canonical(ex.a)
        cls = classify_4x4(ex.a, restarts=args.restarts, seed=args.seed)
        _emit({
            "config": _config(args, example=4, restarts=args.restarts),
            "loc(2)": loc.to_dict(),
            "u(4)": full.to_dict(),
            "partition": list(bs.partition.sizes) if bs.found else None,
            "classify": cls.to_dict(),
        })
        return EXIT_OK
    if k == 5:
        from .linalg import commutator, dagger

        a, u0, om = example5_data()
        _emit({
            "config": _config(args, example=5),
            "conjugation_residual": fro_norm(u0 @ a @ dagger(u0) + a),
            "eigenvector_residual": fro_norm(commutator(om, a) + 1j * np.pi * a),
            "norm_A": fro_norm(a),
        })
        return EXIT_OK
    raise UsageError(f"examples are numbered 1 to 5, got {k}")


# ---------------------------------------------------------------- parser


def _common(p, seed=True, tol=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if tol:
        p.add_argument("--tol-feas", type=float, default=None)


def _positive(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crange", description="Relative C-numerical ranges and their symmetries.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", help="sample W_K(C, A)")
    p.add_argument("--C", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--samples", type=_positive, default=10_000)
    p.add_argument("--grid", type=_positive, default=128)
    p.add_argument("--out")
    p.add_argument("--svg")
    _common(p)
    p.set_defaults(func=cmd_range)

    p = sub.add_parser("radius", help="estimate r_K(C, A)")
    p.add_argument("--C", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--group", required=True)
    p.add_argument("--restarts", type=_positive, default=16)
    _common(p)
    p.set_defaults(func=cmd_radius)

    p = sub.add_parser("symmetry", help="decide weak rotational symmetry of the K-orbit of A")
    p.add_argument("--A", required=True)
    p.add_argument("--group", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--torus", action="store_true", help="restrict witnesses to the diagonal torus")
    mode.add_argument("--tloc", action="store_true", help="exact rational solve over the local torus")
    p.add_argument("--blockshift", action="store_true", help="always report the block-shift search")
    _common(p)
    p.set_defaults(func=cmd_symmetry)

    p = sub.add_parser("local", help="local-group tools")
    lsub = p.add_subparsers(dest="sub", required=True)
    q = lsub.add_parser("classify", help="match a 4x4 matrix to the case table")
    q.add_argument("--A", required=True)
    q.add_argument("--restarts", type=_positive, default=64)
    _common(q)
    q.set_defaults(func=cmd_local_classify)
    q = lsub.add_parser("conjecture", help="search permutation witnesses for block-shift form")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--trials", type=_positive, default=200)
    q.add_argument("--out")
    _common(q, tol=False)
    q.set_defaults(func=cmd_local_conjecture)

    p = sub.add_parser("example", help="reproduce a worked example")
    p.add_argument("number", type=int)
    p.add_argument("--samples", type=_positive, default=None)
    p.add_argument("--restarts", type=_positive, default=512)
    p.add_argument("--grid", type=_positive, default=128)
    p.add_argument("--out")
    p.add_argument("--svg")
    _common(p)
    p.set_defaults(func=cmd_example)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except DimensionError as exc:
        print(f"crange: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except (OSError, ValueError, UsageError) as exc:
        print(f"crange: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
