"""Build, check and list-decode AEL-amplified CSS codes.

Subcommands: build, distance, decode, check-invariants, experiment.

Exit codes: 0 success, 1 a checked assertion failed, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ._common import resolve_cap
from .ael import AelCode, ael_distance, certificate_sweep
from .checks import run_suite
from .css import CssCode, is_ldpc
from .decode import experiment_run, report_csv
from .errors import AelqError, InvariantViolation, SpecError
from .graph import BipartiteGraph, sigma2
from .specs import WorkspaceConfig, json_default

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=json_default)


def _write(out: Path | None, name: str, text: str) -> None:
    if out is None:
        return
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def summarize(obj) -> dict:
    """Parameters, LDPC report and dual-space identity for a code, graph or AEL composition."""
    if isinstance(obj, BipartiteGraph):
        s1, s2 = sigma2(obj)
        return {"kind": "graph", "n": obj.n, "d": obj.d, "sigma1": s1, "sigma2": s2, "lambda": obj.lam}
    if isinstance(obj, CssCode):
        dist = obj.distance
        return {
            "kind": "css",
            "params": f"[[{obj.n_blocks},{obj.k},{dist.weight}]]_{{{obj.field.q},{obj.b}}}",
            "n": obj.n_blocks,
            "k": str(obj.k),
            "q": obj.field.q,
            "b": obj.b,
            "distance": dist.to_dict(),
            "ldpc": is_ldpc(obj),
        }
    if isinstance(obj, AelCode):
        outer, inner = obj.outer, obj.inner
        k = obj.k_folded
        return {
            "kind": "ael",
            "n": obj.n,
            "d": obj.d,
            "q": obj.field.q,
            "b_in": obj.b_in,
            "b_out": obj.b_out,
            "s": obj.s,
            "lambda": obj.lam,
            "k": str(k),
            "k_line": f"k = k_out*k_in/d = {outer.k}*{inner.k}/{obj.d} = {k}",
            "delta_in": str(obj.delta_in),
            "delta_out": str(obj.delta_out),
            "outer": repr(outer),
            "inner": repr(inner),
            "ldpc": obj.ldpc_report(),
            "dual_identity": bool(obj.check_dual_identity()),
        }
    raise TypeError(type(obj))


def cmd_build(cfg: WorkspaceConfig, args, out) -> int:
    names = args.names or list(cfg.ael) or list(cfg.codes)
    result = {name: summarize(cfg.resolve(name)) for name in names}
    text = _dump(result)
    print(text)
    _write(out, "build.json", text + "\n")
    return EXIT_OK


def cmd_distance(cfg: WorkspaceConfig, args, out) -> int:
    names = args.names or list(cfg.ael)
    result, ok = {}, True
    for name in names:
        obj = cfg.resolve(name)
        if isinstance(obj, AelCode):
            rep = ael_distance(obj, args.cap)
            sweep = certificate_sweep(obj, args.cap)
            result[name] = {**rep.to_dict(), "certificate": sweep, "ok": rep.ok and sweep["ok"]}
            ok &= result[name]["ok"]
        elif isinstance(obj, CssCode):
            result[name] = obj.distance.to_dict()
        else:
            raise AelqError(f"{name!r} is not a code")
    text = _dump(result)
    print(text)
    _write(out, "distance.json", text + "\n")
    return EXIT_OK if ok else EXIT_FAIL


def _run_experiment(cfg: WorkspaceConfig, name: str, args, out) -> dict:
    if name not in cfg.experiments:
        raise SpecError(f"unknown experiment {name!r}")
    spec = dict(cfg.experiments[name])
    if args.seed is not None:
        spec["seed"] = args.seed
    spec["cap"] = args.cap
    code = cfg.ael_code(spec.pop("ael"))
    report = experiment_run(code, spec, jobs=args.jobs)
    report["spec"]["ael"] = cfg.experiments[name]["ael"]
    _write(out, f"decode-{name}.json", _dump(report) + "\n")
    _write(out, f"decode-{name}.csv", report_csv(report))
    return report


def _containment_failures(report: dict) -> list[tuple[int, str, list]]:
    """(trial, method, missing coset) for every derandomized containment failure."""
    bad = []
    for row in report["trials"]:
        if "derandomized_success" in row and not row["derandomized_success"]:
            for rep in row.get("derandomized_missing", []) or [None]:
                bad.append((row["trial"], "derandomized", rep))
    return bad


def cmd_decode(cfg: WorkspaceConfig, args, out) -> int:
    names = args.names or list(cfg.experiments)
    status = EXIT_OK
    for name in names:
        report = _run_experiment(cfg, name, args, out)
        print(_dump({name: report["summary"]}))
        for trial, method, rep in _containment_failures(report):
            print(f"{name}: trial {trial}: {method} list misses oracle coset {rep}", file=sys.stderr)
            status = EXIT_FAIL
    return status


def cmd_experiment(cfg: WorkspaceConfig, args, out) -> int:
    names = args.names or list(cfg.experiments)
    status = EXIT_OK
    rows = []
    for name in names:
        report = _run_experiment(cfg, name, args, out)
        rows.append({"experiment": name, **report["summary"]})
        if _containment_failures(report):
            status = EXIT_FAIL
    cols = sorted({k for r in rows for k in r} - {"experiment"})
    lines = [",".join(["experiment"] + cols)]
    lines += [",".join([r["experiment"]] + [str(r.get(c, "")) for c in cols]) for r in rows]
    text = "\n".join(lines) + "\n"
    print(text, end="")
    _write(out, "experiments.csv", text)
    return status


def cmd_check(cfg: WorkspaceConfig, args, out) -> int:
    instances = {name: cfg.ael_code(name) for name in cfg.ael}
    graphs = {name: cfg.graph(name) for name in cfg.graphs}
    results = run_suite(instances, graphs, seed=args.seed or 0, cap=args.cap)
    width = max(len(r.name) for r in results)
    iw = max(len(r.instance) for r in results)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<{width}}  {r.instance:<{iw}}  {r.detail}")
    _write(out, "check-invariants.json", _dump([r.to_dict() for r in results]) + "\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


COMMANDS = {
    "build": cmd_build,
    "distance": cmd_distance,
    "decode": cmd_decode,
    "check-invariants": cmd_check,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="workspace JSON (default: built-in)")
    common.add_argument("--out", type=Path, default=argparse.SUPPRESS, help="report directory")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override experiment seeds")
    common.add_argument("--cap", type=int, default=argparse.SUPPRESS, help="enumeration cap (else $AELQ_CAP)")
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="parallel trials")
    parser = argparse.ArgumentParser(prog="aelq", parents=[common], description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "build": "print code parameters, LDPC report and dual-space identity",
        "distance": "exact AEL distance with per-pair certificates",
        "decode": "run the list decoders on configured experiments",
        "check-invariants": "run the property suite over configured instances",
        "experiment": "run experiments and write a summary table",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text)
        if name != "check-invariants":
            p.add_argument("names", nargs="*", help="config entries (default: all)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("config", None), ("out", None), ("seed", None), ("cap", None), ("jobs", 1)):
        if not hasattr(args, key):
            setattr(args, key, default)
    try:
        cfg = WorkspaceConfig.load(args.config) if args.config else WorkspaceConfig.default()
        args.cap = resolve_cap(args.cap if args.cap is not None else cfg.cap)
        out = args.out if args.out is not None else (Path(cfg.out) if args.config else None)
        return COMMANDS[args.command](cfg, args, out)
    except InvariantViolation as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (AelqError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
