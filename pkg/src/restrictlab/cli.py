"""Command line interface: ``restrictlab {gen,restrict,dim,dd,exp,accept}``.

Exit codes: 0 success (all PASS), 1 an experiment or criterion FAILed,
2 usage, configuration or input error.  Errors are reported on stderr as
``error[CODE]: message``.  Every command prints its resolved configuration
on stderr as a ``config: {...}`` JSON line.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CliError(Exception):
    def __init__(self, code, message, exit_code=EXIT_USAGE):
        super().__init__(message)
        self.code = code
        self.exit_code = exit_code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError("E_USAGE", message)


def _emit_config(d: dict) -> None:
    print("config: " + json.dumps(d, sort_keys=True, default=str), file=sys.stderr)


def _write_text(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _read_function(path):
    from .grid import read_function_csv
    try:
        return read_function_csv(path)
    except FileNotFoundError:
        raise CliError("E_IO", f"no such file: {path}") from None
    except ValueError as e:
        raise CliError("E_INPUT", str(e)) from None


# ---------------------------------------------------------------- gen

def cmd_gen(a) -> int:
    from . import generators as G
    from .grid import function_csv_text, subset_text

    cfg = {"command": "gen", "kind": a.kind, "n": a.n, "seed": a.seed}
    try:
        if a.kind in ("fbm", "fbm_cholesky", "integrated_fbm"):
            cfg["hurst"] = a.hurst
            p = G.FbmParams(a.hurst, a.n, a.seed)
            f = {"fbm": G.fbm_path, "fbm_cholesky": G.fbm_path_cholesky,
                 "integrated_fbm": G.integrated_fbm}[a.kind](p)
        elif a.kind == "sawtooth":
            cfg.update(M_prime=a.M_prime, M=a.M, depth=a.depth, mode=a.mode)
            f = G.sawtooth(G.SawtoothParams(a.M_prime, a.M, a.depth, a.mode), a.n)
        elif a.kind == "quadratic":
            cfg["xi"] = a.xi
            f = G.quadratic(a.xi, a.n)
        elif a.kind == "smooth_base":
            f = G.smooth_base(a.n)
        else:  # cantor
            cfg["level"] = a.level
            _emit_config(cfg)
            _write_text(subset_text(G.cantor_prefix(a.level, a.n)), a.out)
            return EXIT_OK
        if a.delta is not None:
            cfg["delta"] = a.delta
            f = G.perturb_within(f, a.delta, a.seed)
    except ValueError as e:
        raise CliError("E_CONFIG", str(e)) from None
    _emit_config(cfg)
    if a.out in (None, "-"):
        sys.stdout.write(function_csv_text(f))
    else:
        from .grid import write_function_csv
        write_function_csv(f, a.out)
    return EXIT_OK


# ---------------------------------------------------------------- restrict

def cmd_restrict(a) -> int:
    from . import restrictions as R
    from .grid import subset_text

    f = _read_function(a.input)
    _emit_config({"command": "restrict", "op": a.op, "input": a.input, "n": f.n_points})
    if a.op == "record":
        A = R.record_set(f)
    elif a.op in ("minorant", "majorant"):
        mode = R.HullMode.LOWER_CONVEX if a.op == "minorant" else R.HullMode.UPPER_CONCAVE
        res = R.convex_minorant(f, mode)
        if a.csv:
            _write_text(res.csv_text(), a.out)
            return EXIT_OK
        A = res.contact
        print(f"max_gap: {res.max_gap!r}", file=sys.stderr)
    elif a.op == "monotone-inc":
        A = R.longest_monotone_subset(f, R.Direction.INC)
    elif a.op == "monotone-dec":
        A = R.longest_monotone_subset(f, R.Direction.DEC)
    else:  # convex-to-monotone
        A0 = R.convex_minorant(f).contact
        try:
            A = R.convex_to_monotone(f, A0)
        except ValueError as e:
            raise CliError("E_INPUT", str(e)) from None
    _write_text(subset_text(A), a.out)
    return EXIT_OK


# ---------------------------------------------------------------- dim

def cmd_dim(a) -> int:
    from .dimension import box_counts, estimate_dimension, max_level
    from .grid import read_subset

    try:
        A = read_subset(a.input, a.parent_n)
    except FileNotFoundError:
        raise CliError("E_IO", f"no such file: {a.input}") from None
    except ValueError as e:
        raise CliError("E_INPUT", str(e)) from None
    ell = a.ell_max if a.ell_max is not None else max_level(A.parent_n, a.k)
    _emit_config({"command": "dim", "input": a.input, "k": a.k, "ell_max": ell, "parent_n": A.parent_n})
    try:
        prof = box_counts(A, a.k, ell)
    except ValueError as e:
        raise CliError("E_CONFIG", str(e)) from None
    sys.stdout.write(prof.csv_text())
    try:
        est = estimate_dimension(prof, a.min_window)
        print("estimate: " + est.to_json())
    except ValueError as e:
        print(f"estimate: unavailable ({e})")
    return EXIT_OK


# ---------------------------------------------------------------- dd

def _read_points(path):
    try:
        data = np.genfromtxt(path, delimiter=",", names=True)
    except (OSError, FileNotFoundError):
        raise CliError("E_IO", f"cannot read {path}") from None
    names = data.dtype.names or ()
    if names[:2] != ("x", "y"):
        raise CliError("E_INPUT", f"{path}: expected header 'x,y'")
    return np.atleast_1d(data["x"]).astype(float), np.atleast_1d(data["y"]).astype(float)


def cmd_dd(a) -> int:
    from .divided_diff import build_table, largest_homogeneous_subset

    xs, ys = _read_points(a.input)
    _emit_config({"command": "dd", "input": a.input, "order": a.order, "max_exact": a.max_exact,
                  "homogeneous": a.homogeneous})
    try:
        if a.homogeneous:
            res = largest_homogeneous_subset(xs, ys, a.order, a.max_exact)
            print(json.dumps(res.to_dict(), sort_keys=True))
        else:
            print(json.dumps(build_table(xs, ys).to_dict()))
    except ValueError as e:
        raise CliError("E_INPUT", str(e)) from None
    return EXIT_OK


# ---------------------------------------------------------------- exp / accept

def cmd_exp(a) -> int:
    from .experiments import ConfigError, ExperimentConfig, run_experiment

    try:
        cfg = ExperimentConfig.from_file(a.config)
        if a.out_dir:
            cfg.out_dir = a.out_dir
        if a.seed is not None:
            cfg.seed = a.seed
        cfg = cfg.resolved()
    except FileNotFoundError:
        raise CliError("E_IO", f"no such file: {a.config}") from None
    except ConfigError as e:
        raise CliError("E_CONFIG", str(e)) from None
    _emit_config(cfg.to_dict())
    rep = run_experiment(cfg, workers=a.workers)
    line = rep.summary_line()
    Path(cfg.out_dir).mkdir(parents=True, exist_ok=True)
    (Path(cfg.out_dir) / "summary.txt").write_text(line + "\n")
    print(line)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_accept(a) -> int:
    from .acceptance import ACCEPT_SEED, run_acceptance
    from .experiments import OUT_DIR_ENV

    out = a.out_dir or os.environ.get(OUT_DIR_ENV) or "restrictlab_out"
    _emit_config({"command": "accept", "seed": ACCEPT_SEED, "out_dir": out, "workers": a.workers})
    results = run_acceptance(out, a.workers, on_result=lambda r: print(r.line(), flush=True))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="restrictlab", description="Monotone and convex restrictions of sampled functions.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a function (CSV) or a Cantor index set")
    g.add_argument("--kind", required=True,
                   choices=["fbm", "fbm_cholesky", "integrated_fbm", "sawtooth", "quadratic", "smooth_base", "cantor"])
    g.add_argument("--n", type=int, default=1025, help="grid size (default 1025)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--hurst", type=float, default=0.5)
    g.add_argument("--M-prime", dest="M_prime", type=int, default=2)
    g.add_argument("--M", type=int, default=4)
    g.add_argument("--depth", type=float, default=1.0)
    g.add_argument("--mode", default="MONOTONE_KILLER", choices=["MONOTONE_KILLER", "CONVEXITY_KILLER"])
    g.add_argument("--xi", type=float, default=2.0)
    g.add_argument("--level", type=int, default=4)
    g.add_argument("--delta", type=float, default=None, help="add a random perturbation of sup-norm < delta")
    g.add_argument("--out", default=None)
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("restrict", help="extract a subset from a CSV function")
    r.add_argument("input")
    r.add_argument("--op", required=True,
                   choices=["record", "minorant", "majorant", "monotone-inc", "monotone-dec", "convex-to-monotone"])
    r.add_argument("--csv", action="store_true", help="minorant/majorant: write x,f,g,is_contact instead of indices")
    r.add_argument("--out", default=None)
    r.set_defaults(func=cmd_restrict)

    d = sub.add_parser("dim", help="box counts and dimension estimate of an index-set file")
    d.add_argument("input")
    d.add_argument("--k", type=int, default=2)
    d.add_argument("--ell-max", dest="ell_max", type=int, default=None)
    d.add_argument("--parent-n", dest="parent_n", type=int, default=None)
    d.add_argument("--min-window", dest="min_window", type=int, default=4)
    d.set_defaults(func=cmd_dim)

    t = sub.add_parser("dd", help="divided-difference table or largest homogeneous subset of an x,y CSV")
    t.add_argument("input")
    t.add_argument("--order", type=int, default=2)
    t.add_argument("--homogeneous", action="store_true")
    t.add_argument("--max-exact", dest="max_exact", type=int, default=16)
    t.set_defaults(func=cmd_dd)

    e = sub.add_parser("exp", help="run one experiment from a JSON config")
    e.add_argument("config")
    e.add_argument("--out-dir", dest="out_dir", default=None)
    e.add_argument("--seed", type=int, default=None)
    e.add_argument("--workers", type=int, default=1)
    e.set_defaults(func=cmd_exp)

    ac = sub.add_parser("accept", help="run the full acceptance suite")
    ac.add_argument("--out-dir", dest="out_dir", default=None)
    ac.add_argument("--workers", type=int, default=1)
    ac.set_defaults(func=cmd_accept)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            raise CliError("E_USAGE", "missing subcommand")
        return args.func(args)
    except CliError as e:
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error[E_IO]: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
