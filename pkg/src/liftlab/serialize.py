"""JSON and CSV forms of every artifact.  Rationals travel as "p/q" strings."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import struct
from fractions import Fraction

from .cells import Atom, CellDensity, CellPairDensity, Side
from .core import BooleanFunction, ConicalJuntaRep, Conjunction, Density, PairDensity, Verdict
from .decompose import DecompositionResult, Leaf, TreeNode
from .errors import InputError
from .lift import ApproxConicalJuntaWitness, FactorTerm, NonnegFactorization
from .pattern import PatternMatrix
from .sa import PseudoExpectation, SeparatingFunctional

SCHEMA_VERSION = 1


def rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def unrat(s) -> Fraction:
    if isinstance(s, bool) or isinstance(s, float):
        raise InputError("rational expected as a 'p/q' string or integer, got %r" % (s,))
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InputError("malformed rational %r" % (s,)) from None


def _need(obj: dict, kind: str):
    if not isinstance(obj, dict) or obj.get("type") != kind:
        raise InputError("expected a %s object" % kind)


# ---------------------------------------------------------------- functions and densities


def function_to_json(f: BooleanFunction) -> dict:
    return {"type": "boolean_function", "n": f.n, "order": "bit i set means x_i = -1", "values": [rat(v) for v in f.values]}


def function_from_json(obj: dict) -> BooleanFunction:
    _need(obj, "boolean_function")
    return BooleanFunction(int(obj["n"]), tuple(unrat(v) for v in obj["values"]))


def density_to_json(u: Density) -> dict:
    return {"type": "density", "q": u.q, "n": u.n, "order": "little-endian block index", "mass": [rat(v) for v in u.mass]}


def density_from_json(obj: dict) -> Density:
    _need(obj, "density")
    return Density(int(obj["q"]), int(obj["n"]), tuple(unrat(v) for v in obj["mass"]))


def pair_density_to_json(mu: PairDensity) -> dict:
    return {"type": "pair_density", "q": mu.q, "n": mu.n, "order": "x + q^n y", "mass": [rat(v) for v in mu.mass]}


def pair_density_from_json(obj: dict) -> PairDensity:
    _need(obj, "pair_density")
    return PairDensity(int(obj["q"]), int(obj["n"]), tuple(unrat(v) for v in obj["mass"]))


def conjunction_to_json(c: Conjunction) -> list:
    return [[i, s] for i, s in c.fixed]


def conjunction_from_json(obj) -> Conjunction:
    return Conjunction(tuple((int(i), int(s)) for i, s in obj))


def junta_to_json(rep: ConicalJuntaRep) -> dict:
    return {"type": "conical_junta", "terms": [{"weight": rat(w), "fixed": conjunction_to_json(c)} for w, c in rep.terms]}


def junta_from_json(obj: dict) -> ConicalJuntaRep:
    _need(obj, "conical_junta")
    return ConicalJuntaRep(tuple((unrat(t["weight"]), conjunction_from_json(t["fixed"])) for t in obj["terms"]))


def pseudoexpectation_to_json(pe: PseudoExpectation) -> dict:
    return {"type": "pseudoexpectation", "n": pe.n, "d": pe.d, "moments": {str(m): rat(v) for m, v in sorted(pe.moments.items())}}


def pseudoexpectation_from_json(obj: dict) -> PseudoExpectation:
    _need(obj, "pseudoexpectation")
    return PseudoExpectation(int(obj["n"]), int(obj["d"]), {int(k): unrat(v) for k, v in obj["moments"].items()})


def functional_to_json(sf: SeparatingFunctional) -> dict:
    return {"type": "separating_functional", "n": sf.n, "D": sf.D, "eta": rat(sf.eta), "L": function_to_json(sf.L), "f": function_to_json(sf.f)}


def functional_from_json(obj: dict) -> SeparatingFunctional:
    _need(obj, "separating_functional")
    return SeparatingFunctional(int(obj["n"]), int(obj["D"]), function_from_json(obj["L"]), unrat(obj["eta"]), function_from_json(obj["f"]))


# ---------------------------------------------------------------- cells


def atom_to_json(a: Atom) -> list:
    return [a.lo, a.k, sorted(a.excluded)]


def atom_from_json(obj) -> Atom:
    lo, k, ex = obj
    return Atom(int(lo), int(k), frozenset(int(e) for e in ex))


def _cells_to_json(cells) -> list:
    return [[atom_to_json(a) for a in block] for block in cells]


def _cells_from_json(obj) -> tuple:
    return tuple(tuple(atom_from_json(a) for a in block) for block in obj)


def _keyed(d: dict) -> list:
    return [[list(k), rat(v)] for k, v in sorted(d.items())]


def _unkeyed(rows) -> dict:
    return {tuple(int(i) for i in k): unrat(v) for k, v in rows}


def cell_density_to_json(u: CellDensity) -> dict:
    return {"type": "cell_density", "b": u.b, "cells": _cells_to_json(u.cells), "mass": _keyed(u.mass)}


def cell_density_from_json(obj: dict) -> CellDensity:
    _need(obj, "cell_density")
    return CellDensity(int(obj["b"]), _cells_from_json(obj["cells"]), _unkeyed(obj["mass"]))


def cell_pair_density_to_json(mu: CellPairDensity) -> dict:
    out = {"type": "cell_pair_density", "b": mu.b, "x_cells": _cells_to_json(mu.x_cells), "y_cells": _cells_to_json(mu.y_cells)}
    if mu.is_product:
        out["x_weights"] = _keyed(mu.x_weights)
        out["y_weights"] = _keyed(mu.y_weights)
    else:
        out["weights"] = [[list(kx), list(ky), rat(v)] for (kx, ky), v in sorted(mu.weights.items())]
    return out


def cell_pair_density_from_json(obj: dict) -> CellPairDensity:
    _need(obj, "cell_pair_density")
    b = int(obj["b"])
    xc, yc = _cells_from_json(obj["x_cells"]), _cells_from_json(obj["y_cells"])
    if "x_weights" in obj:
        return CellPairDensity(b, xc, yc, x_weights=_unkeyed(obj["x_weights"]), y_weights=_unkeyed(obj["y_weights"]))
    w = {(tuple(kx), tuple(ky)): unrat(v) for kx, ky, v in obj["weights"]}
    return CellPairDensity(b, xc, yc, w)


def side_to_json(s: Side) -> dict:
    return {
        "partition": _cells_to_json(s.partition),
        "base": [list(b) for b in s.base],
        "boxes": sorted(list(b) for b in s.boxes),
        "pinned": sorted(s.pinned),
    }


def side_from_json(obj: dict) -> Side:
    return Side(
        _cells_from_json(obj["partition"]),
        tuple(tuple(int(j) for j in b) for b in obj["base"]),
        frozenset(tuple(int(j) for j in b) for b in obj["boxes"]),
        frozenset(int(i) for i in obj["pinned"]),
    )


# ---------------------------------------------------------------- decomposition


def _node_to_json(node: TreeNode) -> dict:
    return {
        "id": node.id,
        "kind": node.kind,
        "F": list(node.F),
        "mass": rat(node.mass),
        "multiplicity": node.multiplicity,
        "S": list(node.S),
        "alpha": list(node.alpha),
        "rel": [rat(r) for r in node.rel],
        "theta": [rat(r) for r in node.theta],
        "terminal": node.terminal,
        "terminal_rel": rat(node.terminal_rel),
        "leaf": node.leaf,
        "children": [_node_to_json(c) for c in node.children],
    }


def _node_from_json(obj: dict) -> TreeNode:
    return TreeNode(
        int(obj["id"]),
        obj["kind"],
        tuple(obj["F"]),
        unrat(obj["mass"]),
        int(obj["multiplicity"]),
        tuple(obj["S"]),
        tuple(obj["alpha"]),
        [_node_from_json(c) for c in obj["children"]],
        [unrat(r) for r in obj["rel"]],
        [unrat(r) for r in obj["theta"]],
        obj["terminal"],
        unrat(obj["terminal_rel"]),
        obj["leaf"],
    )


def leaf_to_json(leaf: Leaf) -> dict:
    return {
        "kind": leaf.kind,
        "F": list(leaf.F),
        "mass": rat(leaf.mass),
        "multiplicity": leaf.multiplicity,
        "node": leaf.node,
        "A": side_to_json(leaf.A),
        "B": side_to_json(leaf.B),
    }


def leaf_from_json(obj: dict) -> Leaf:
    return Leaf(obj["kind"], side_from_json(obj["A"]), side_from_json(obj["B"]), tuple(obj["F"]), unrat(obj["mass"]), int(obj["multiplicity"]), int(obj["node"]))


def decomposition_to_json(res: DecompositionResult) -> dict:
    return {
        "type": "decomposition",
        "version": SCHEMA_VERSION,
        "d": res.d,
        "b": res.b,
        "n": res.n,
        "t": rat(res.t),
        "node_count": res.node_count,
        "density": cell_pair_density_to_json(res.mu),
        "leaves": [leaf_to_json(l) for l in res.leaves],
        "tree": _node_to_json(res.root),
    }


def decomposition_from_json(obj: dict) -> DecompositionResult:
    _need(obj, "decomposition")
    mu = cell_pair_density_from_json(obj["density"])
    return DecompositionResult(
        mu,
        int(obj["d"]),
        int(obj["b"]),
        int(obj["n"]),
        unrat(obj["t"]),
        [leaf_from_json(l) for l in obj["leaves"]],
        _node_from_json(obj["tree"]),
        int(obj["node_count"]),
    )


def good_rectangles_csv(res: DecompositionResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["leaf", "kind", "fixed_blocks", "member_mass", "multiplicity", "x_side", "y_side"])
    for k, leaf in enumerate(res.leaves):
        w.writerow(
            [
                k,
                leaf.kind,
                " ".join(str(i) for i in leaf.F),
                rat(leaf.mass),
                leaf.multiplicity,
                "|".join(" ".join(box) for box in leaf.A.describe()),
                "|".join(" ".join(box) for box in leaf.B.describe()),
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------- lifting


def factorization_to_json(F: NonnegFactorization) -> dict:
    terms = []
    for t in F.terms:
        item = {"weight": rat(t.weight), "multiplicity": t.multiplicity, "x": cell_density_to_json(t.x), "y": cell_density_to_json(t.y)}
        if t.source:
            conj, vals = t.source
            item["source"] = {"fixed": conjunction_to_json(conj), "values": [[i, a] for i, a in sorted(vals.items())]}
        terms.append(item)
    return {"type": "nonneg_factorization", "b": F.b, "n": F.n, "terms": terms}


def factorization_from_json(obj: dict) -> NonnegFactorization:
    _need(obj, "nonneg_factorization")
    terms = []
    for t in obj["terms"]:
        src = ()
        if "source" in t:
            src = (conjunction_from_json(t["source"]["fixed"]), {int(i): int(a) for i, a in t["source"]["values"]})
        terms.append(FactorTerm(unrat(t["weight"]), cell_density_from_json(t["x"]), cell_density_from_json(t["y"]), int(t.get("multiplicity", 1)), src))
    return NonnegFactorization(int(obj["b"]), int(obj["n"]), tuple(terms))


def witness_to_json(W: ApproxConicalJuntaWitness) -> dict:
    return {
        "type": "approx_conical_junta",
        "n": W.n,
        "e": rat(W.e),
        "delta": rat(W.delta),
        "d": W.d,
        "terms": [{"lambda": rat(l), "fixed": conjunction_to_json(C), "h": [rat(v) for v in h.values]} for l, C, h in W.terms],
        "gamma": [rat(v) for v in W.gamma.values],
    }


def witness_from_json(obj: dict) -> ApproxConicalJuntaWitness:
    _need(obj, "approx_conical_junta")
    n = int(obj["n"])
    terms = tuple((unrat(t["lambda"]), conjunction_from_json(t["fixed"]), BooleanFunction(n, tuple(unrat(v) for v in t["h"]))) for t in obj["terms"])
    gamma = BooleanFunction(n, tuple(unrat(v) for v in obj["gamma"]))
    return ApproxConicalJuntaWitness(n, terms, gamma, unrat(obj["e"]), unrat(obj["delta"]), int(obj["d"]))


# ---------------------------------------------------------------- pattern matrices


def matrix_csv(M: PatternMatrix) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in M.entries:
        w.writerow([rat(v) for v in row])
    return buf.getvalue()


def _signed_bytes(v: int) -> bytes:
    length = (v.bit_length() + 8) // 8
    return v.to_bytes(length, "big", signed=True)


def matrix_binary(M: PatternMatrix) -> bytes:
    """'LLPM', rows and columns as uint32, then per cell: numerator and denominator, each length-prefixed."""
    out = [b"LLPM", struct.pack(">II", M.size, M.size)]
    for row in M.entries:
        for v in row:
            for part in (v.numerator, v.denominator):
                raw = _signed_bytes(part)
                out.append(struct.pack(">H", len(raw)))
                out.append(raw)
    return b"".join(out)


def matrix_from_binary(data: bytes) -> list:
    if data[:4] != b"LLPM":
        raise InputError("not a liftlab matrix table")
    rows, cols = struct.unpack(">II", data[4:12])
    pos = 12
    out = []
    for _ in range(rows):
        row = []
        for _ in range(cols):
            parts = []
            for _ in range(2):
                (length,) = struct.unpack(">H", data[pos : pos + 2])
                pos += 2
                parts.append(int.from_bytes(data[pos : pos + length], "big", signed=True))
                pos += length
            row.append(Fraction(parts[0], parts[1]))
        out.append(row)
    if pos != len(data):
        raise InputError("trailing bytes in matrix table")
    return out


def matrix_manifest(M: PatternMatrix, csv_text: str, binary: bytes) -> dict:
    return {
        "type": "pattern_matrix",
        "n": M.n,
        "b": M.b,
        "f": function_to_json(M.source),
        "rows": "x, little-endian block index",
        "columns": "y, little-endian block index",
        "csv_sha256": hashlib.sha256(csv_text.encode()).hexdigest(),
        "binary_sha256": hashlib.sha256(binary).hexdigest(),
    }


# ---------------------------------------------------------------- reports


def report_value(v):
    """Exact values as strings, floats beside rationals marked display-only."""
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, Fraction):
        return {"exact": rat(v), "display-only": float(v)}
    if isinstance(v, Verdict):
        return {"ok": v.ok, "reason": v.reason, "witness": report_value(v.witness)}
    if isinstance(v, dict):
        return {str(k): report_value(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [report_value(x) for x in v]
    if isinstance(v, BooleanFunction):
        return function_to_json(v)
    if isinstance(v, Conjunction):
        return conjunction_to_json(v)
    if hasattr(v, "__dataclass_fields__"):
        return {k: report_value(getattr(v, k)) for k in v.__dataclass_fields__}
    return repr(v)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"
