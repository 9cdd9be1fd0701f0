"""Command-line front end.

Every subcommand is deterministic given its flags and seed.  Artifacts go to
the output directory in a fixed order; a machine-readable report is printed
to stdout as JSON.  Exit codes: 0 verified, 1 a verification item failed,
2 invalid input, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

from . import acceptance, serialize
from .cells import CellPairDensity, random_cell_density
from .core import BooleanFunction
from .csp import encode_polynomial, parse
from .decompose import decompose_rect, verify_decomposition, verify_trace
from .errors import InputError, LiftlabError, ResourceError
from .lift import factorization_to_witness, junta_to_factorization, nnr_report, robustness_check, verify_witness
from .pattern import acc, build_pattern_matrix
from .sa import degp_exact, degp_feasible, duality_check, sa_value, separating_functional, verify_separating_functional

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


# ---------------------------------------------------------------- config


@dataclass(frozen=True)
class Config:
    max_n: int = 20
    max_nb: int = 14
    max_lp_cells: int = 4_000_000
    default_b: int = 1
    eta: str = "1/n"  # "1/n" or a rational
    seed: int = 0
    out_dir: str = "."
    emit_format: str = "json"

    def __post_init__(self):
        for name in ("max_n", "max_nb", "max_lp_cells", "default_b"):
            if getattr(self, name) <= 0:
                raise InputError("config value %s must be positive" % name)
        if self.emit_format not in ("json", "csv", "text"):
            raise InputError("emit_format must be json, csv or text")
        if self.eta != "1/n":
            try:
                if Fraction(self.eta) <= 0:
                    raise InputError("eta must be positive")
            except ValueError:
                raise InputError("eta must be '1/n' or a rational") from None

    def eta_for(self, n: int) -> Fraction:
        return Fraction(1, n) if self.eta == "1/n" else Fraction(self.eta)

    def dump(self) -> str:
        return "".join("%s = %s\n" % (f.name, getattr(self, f.name)) for f in fields(self))

    @classmethod
    def load(cls, text: str) -> "Config":
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for no, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError("config line %d: expected 'key = value'" % no)
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in kinds:
                raise InputError("config line %d: unknown key %r" % (no, key))
            if kinds[key] in (int, "int"):
                try:
                    values[key] = int(val)
                except ValueError:
                    raise InputError("config line %d: %s must be an integer" % (no, key)) from None
            else:
                values[key] = val
        return cls(**values)


# ---------------------------------------------------------------- helpers


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError("no such file: %s" % path) from None
    except json.JSONDecodeError as exc:
        raise InputError("%s is not valid JSON: %s" % (path, exc)) from None


def _read_instance(path: str):
    try:
        return parse(Path(path).read_text())
    except FileNotFoundError:
        raise InputError("no such file: %s" % path) from None


def _load_function(args, cfg: Config) -> BooleanFunction:
    """--f function.json, or --instance with --c giving f = c - I."""
    if getattr(args, "f", None):
        f = serialize.function_from_json(_read_json(args.f))
    elif getattr(args, "instance", None):
        if args.c is None:
            raise InputError("--instance needs --c to form f = c - I")
        f = Fraction(args.c) - encode_polynomial(_read_instance(args.instance))
    else:
        raise InputError("give --f or --instance")
    if f.n > cfg.max_n:
        raise ResourceError("n = %d exceeds the configured cap %d" % (f.n, cfg.max_n))
    return f


class _Run:
    """Collects artifacts and the report for one invocation."""

    def __init__(self, cfg: Config, out=sys.stdout):
        self.cfg = cfg
        self.out = out
        self.dir = Path(cfg.out_dir)
        self.written = []

    def write(self, name: str, data):
        self.dir.mkdir(parents=True, exist_ok=True)
        p = self.dir / name
        if isinstance(data, bytes):
            p.write_bytes(data)
        else:
            p.write_text(data if isinstance(data, str) else serialize.dumps(data))
        self.written.append(str(p))

    def report(self, command: str, ok: bool, body: dict) -> int:
        rep = {"command": command, "ok": ok, "artifacts": list(self.written)}
        rep.update(serialize.report_value(body))
        if self.cfg.emit_format == "json":
            self.out.write(serialize.dumps(rep))
        else:
            for k, v in rep.items():
                self.out.write("%s: %s\n" % (k, json.dumps(v)))
        return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------- subcommands


def cmd_sa_value(args, run: _Run) -> int:
    inst = _read_instance(args.instance)
    if inst.n > run.cfg.max_n:
        raise ResourceError("n = %d exceeds the configured cap %d" % (inst.n, run.cfg.max_n))
    value, pe = sa_value(inst, args.degree, run.cfg.max_lp_cells)
    run.out.write("%s\n" % serialize.rat(value))
    run.write("pseudoexpectation.json", serialize.pseudoexpectation_to_json(pe))
    if run.cfg.emit_format == "json" and not args.quiet:
        return run.report("sa-value", True, {"value": value, "degree": args.degree})
    return EXIT_OK


def cmd_degp(args, run: _Run) -> int:
    f = _load_function(args, run.cfg)
    d = args.degree if args.degree is not None else degp_exact(f, run.cfg.max_lp_cells)
    res = degp_feasible(f, d, run.cfg.max_lp_cells)
    body = {"d": d, "feasible": res.feasible}
    if res.feasible:
        run.write("junta.json", serialize.junta_to_json(res.junta))
    else:
        eta = Fraction(args.eta) if args.eta else run.cfg.eta_for(f.n)
        sf = separating_functional(f, d, eta, run.cfg.max_lp_cells)
        rep = verify_separating_functional(sf)
        run.write("functional.json", serialize.functional_to_json(sf))
        body["functional_items"] = rep.items
        return run.report("degp", rep.ok, body)
    return run.report("degp", True, body)


def cmd_duality_check(args, run: _Run) -> int:
    inst = _read_instance(args.instance)
    rep = duality_check(inst, args.degree, Fraction(args.c), run.cfg.max_lp_cells)
    body = {"sa_value": rep.sa_value, "sa_le_c": rep.sa_le_c, "degp_le_d": rep.degp_le_d, "c": Fraction(args.c), "degree": args.degree}
    run.write("pseudoexpectation.json", serialize.pseudoexpectation_to_json(rep.pseudoexpectation))
    return run.report("duality-check", rep.ok, body)


def cmd_pattern_build(args, run: _Run) -> int:
    f = _load_function(args, run.cfg)
    b = args.b or run.cfg.default_b
    M = build_pattern_matrix(f, b, run.cfg.max_nb)
    text, data = serialize.matrix_csv(M), serialize.matrix_binary(M)
    run.write("pattern.csv", text)
    run.write("pattern.bin", data)
    run.write("pattern_manifest.json", serialize.matrix_manifest(M, text, data))
    return run.report("pattern-build", True, {"n": f.n, "b": b, "rows": M.size})


def cmd_acc(args, run: _Run) -> int:
    u = serialize.density_from_json(_read_json(args.u))
    v = serialize.density_from_json(_read_json(args.v))
    nu = acc(u, v, args.b)
    run.write("acc.json", serialize.function_to_json(nu))
    return run.report("acc", True, {"acc": nu})


def _input_density(args, rng) -> CellPairDensity:
    if args.input_density:
        obj = _read_json(args.input_density)
        if obj.get("type") == "cell_pair_density":
            return serialize.cell_pair_density_from_json(obj)
        return CellPairDensity.from_pair_density(serialize.pair_density_from_json(obj))
    if args.b is None or args.n is None:
        raise InputError("--b and --n are required without --input-density")
    if args.input == "uniform":
        return CellPairDensity.uniform(args.b, args.n)
    return random_cell_density(rng, args.b, args.n, args.pieces, args.planted)


def cmd_decompose(args, run: _Run) -> int:
    seed = args.seed if args.seed is not None else run.cfg.seed
    mu = _input_density(args, random.Random(seed))
    res = decompose_rect(mu, args.d, require_b_multiple_of_20=args.strict_b)
    run.write("decomposition.json", serialize.decomposition_to_json(res))
    run.write("good_rectangles.csv", serialize.good_rectangles_csv(res))
    body = {
        "b": res.b,
        "n": res.n,
        "d": res.d,
        "seed": seed,
        "good_rectangles": res.good_count(),
        "leaves": len(res.leaves),
        "error_mass": res.error_mass(),
        "error_a_mass": res.error_mass("error_a"),
        "error_b_mass": res.error_mass("error_b"),
    }
    return run.report("decompose", True, body)


def cmd_verify_decomposition(args, run: _Run) -> int:
    res = serialize.decomposition_from_json(_read_json(args.decomposition))
    rep = verify_decomposition(res.mu, res)
    trace = verify_trace(res)
    items = dict(rep.items)
    items.update({"trace_" + k: v for k, v in trace.items.items()})
    failed = [k for k, v in items.items() if not v]
    return run.report("verify-decomposition", not failed, {"items": items, "failed": failed})


def cmd_lift_witness(args, run: _Run) -> int:
    f = _load_function(args, run.cfg)
    b = args.b or run.cfg.default_b
    dp = args.junta_degree if args.junta_degree is not None else degp_exact(f, run.cfg.max_lp_cells)
    res = degp_feasible(f, dp, run.cfg.max_lp_cells)
    if not res.feasible:
        raise InputError("f has no conical junta of degree %d" % dp)
    F = junta_to_factorization(res.junta, b, f.n, f)
    run.write("factorization.json", serialize.factorization_to_json(F))
    d = args.d if args.d is not None else dp
    W = factorization_to_witness(F, d, require_b_multiple_of_20=not args.any_b)
    run.write("witness.json", serialize.witness_to_json(W))
    wrep = verify_witness(f, W)
    body = {"junta_degree": dp, "d": d, "b": b, "rank": F.rank, "witness_terms": len(W.terms), "delta": W.delta, "items": wrep.items}
    ok = wrep.ok
    if args.robustness:
        rob = robustness_check(f, W, d)
        body["robustness"] = {"ok": rob.ok, "degree": rob.degree}
        ok = ok and rob.ok
    return run.report("lift-witness", ok, body)


def cmd_verify_witness(args, run: _Run) -> int:
    f = _load_function(args, run.cfg)
    W = serialize.witness_from_json(_read_json(args.witness))
    if W.n != f.n:
        raise InputError("witness has n = %d, function has n = %d" % (W.n, f.n))
    rep = verify_witness(f, W)
    failed = [k for k, v in rep.items.items() if not v]
    return run.report("verify-witness", rep.ok, {"items": rep.items, "failed": failed})


def cmd_nnr_report(args, run: _Run) -> int:
    f = _load_function(args, run.cfg)
    b = args.b or run.cfg.default_b
    if f.n * b > run.cfg.max_nb:
        raise ResourceError("n*b = %d exceeds the configured cap %d" % (f.n * b, run.cfg.max_nb))
    rows = nnr_report(f, b, range(args.d_min, args.d_max + 1))
    lines = ["d,feasible,terms,bound,verified"] + ["%d,%s,%s,%s,%s" % (r.d, r.feasible, r.terms, r.bound, r.verified) for r in rows]
    run.write("nnr_report.csv", "\n".join(lines) + "\n")
    ok = all(r.verified is not False for r in rows)
    return run.report("nnr-report", ok, {"b": b, "rows": rows})


def cmd_selftest(args, run: _Run) -> int:
    lines = []
    results = acceptance.run_all(quick=args.quick, out=lines.append)
    examples = acceptance.operation_examples()
    for name, ok, detail in examples:
        lines.append("example %-34s %s  (%s)" % (name, "PASS" if ok else "FAIL", detail))
    for line in lines:
        run.out.write(line + "\n")
    ok = all(r.ok for r in results) and all(ok for _, ok, _ in examples)
    run.out.write("selftest %s\n" % ("PASS" if ok else "FAIL"))
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------- parser


def _add_function_source(p):
    p.add_argument("--f", help="boolean function JSON")
    p.add_argument("--instance", help="CSP instance file; used with --c as f = c - I")
    p.add_argument("--c", help="threshold c for f = c - I")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="liftlab", description="Exact lifting, Sherali-Adams and rectangle decomposition tools.")
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--out", help="output directory (overrides config)")
    ap.add_argument("--format", choices=("json", "csv", "text"), help="report format (overrides config)")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sa-value", help="Sherali-Adams value of a CSP instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--quiet", action="store_true", help="print only the value")
    p.set_defaults(func=cmd_sa_value)

    p = sub.add_parser("degp", help="conical junta degree test, or a separating functional when infeasible")
    _add_function_source(p)
    p.add_argument("--degree", type=int, help="test this degree (default: compute deg+)")
    p.add_argument("--eta", help="separation margin (default from config)")
    p.set_defaults(func=cmd_degp)

    p = sub.add_parser("duality-check", help="check SA_d <= c iff deg+(c - I) <= d")
    p.add_argument("--instance", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--c", required=True)
    p.set_defaults(func=cmd_duality_check)

    p = sub.add_parser("pattern-build", help="write the pattern matrix as CSV, binary and manifest")
    _add_function_source(p)
    p.add_argument("--b", type=int)
    p.set_defaults(func=cmd_pattern_build)

    p = sub.add_parser("acc", help="accepting-probability function of two densities")
    p.add_argument("--u", required=True)
    p.add_argument("--v", required=True)
    p.add_argument("--b", type=int)
    p.set_defaults(func=cmd_acc)

    p = sub.add_parser("decompose", help="rectangle decomposition of a density")
    p.add_argument("--b", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--input", choices=("uniform", "random"), default="uniform")
    p.add_argument("--input-density", help="pair density JSON (overrides --input)")
    p.add_argument("--pieces", type=int, default=4, help="cells per block for --input random")
    p.add_argument("--planted", type=int, default=0, help="planted point masses for --input random")
    p.add_argument("--strict-b", action="store_true", help="require b to be a multiple of 20")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("verify-decomposition", help="recheck a decomposition artifact")
    p.add_argument("--decomposition", required=True)
    p.set_defaults(func=cmd_verify_decomposition)

    p = sub.add_parser("lift-witness", help="lift a conical junta to a factorization and back to a witness")
    _add_function_source(p)
    p.add_argument("--b", type=int)
    p.add_argument("--d", type=int, help="decomposition degree (default: the junta degree)")
    p.add_argument("--junta-degree", type=int)
    p.add_argument("--any-b", action="store_true", help="allow b not a multiple of 20")
    p.add_argument("--robustness", action="store_true", help="also run the robustness check")
    p.set_defaults(func=cmd_lift_witness)

    p = sub.add_parser("verify-witness", help="recheck an approximate conical junta witness")
    _add_function_source(p)
    p.add_argument("--witness", required=True)
    p.set_defaults(func=cmd_verify_witness)

    p = sub.add_parser("nnr-report", help="factorization sizes per degree")
    _add_function_source(p)
    p.add_argument("--b", type=int)
    p.add_argument("--d-min", type=int, default=0)
    p.add_argument("--d-max", type=int, default=3)
    p.set_defaults(func=cmd_nnr_report)

    p = sub.add_parser("selftest", help="run the acceptance suite and per-operation examples")
    p.add_argument("--quick", action="store_true", help="smaller random samples")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        cfg = Config.load(Path(args.config).read_text()) if args.config else Config()
        if args.out:
            cfg = replace(cfg, out_dir=args.out)
        if args.format:
            cfg = replace(cfg, emit_format=args.format)
        return args.func(args, _Run(cfg, out))
    except (FileNotFoundError, ValueError, ZeroDivisionError) as exc:
        # malformed numbers in flags surface as ValueError from Fraction
        err = {"command": args.command, "ok": False, "error": "InputError", "message": str(exc)}
        out.write(serialize.dumps(err))
        return EXIT_INPUT
    except LiftlabError as exc:
        err = {"command": args.command, "ok": False, "error": type(exc).__name__, "message": str(exc)}
        out.write(serialize.dumps(err))
        return exc.exit_code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
