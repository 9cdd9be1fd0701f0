"""Constraint satisfaction instances over {-1,1}^n.

A literal is a signed 1-based variable index: +v reads x_v, -v reads -x_v.
For XOR predicates each constraint also carries a parity bit, and the
constraint holds when the XOR of the literal bits equals it (bit 1 means
x = -1).  The predicate's own truth table is the parity-1 case.  A SAT
literal is true when it evaluates to +1.  Values are normalized by the
constraint count, so I(x) lies in [0, 1].
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import BooleanFunction, point_signs
from .errors import InputError, ParseError, ResourceError

FORMAT_VERSION = 1
OPT_CAP = 24


@dataclass(frozen=True)
class Predicate:
    name: str
    arity: int
    table: tuple  # table[idx] for idx in the {-1,1}^k point order

    def __post_init__(self):
        if len(self.table) != 1 << self.arity:
            raise InputError("predicate table has %d entries, expected %d" % (len(self.table), 1 << self.arity))
        object.__setattr__(self, "table", tuple(bool(t) for t in self.table))

    def __call__(self, signs: Sequence[int]) -> bool:
        idx = 0
        for i, s in enumerate(signs):
            if s == -1:
                idx |= 1 << i
        return self.table[idx]

    @property
    def is_xor(self) -> bool:
        return self.name.endswith("xor")


def maxcut() -> Predicate:
    # P(a, b) = (1 - ab)/2
    return Predicate("maxcut", 2, tuple(point_signs(i, 2)[0] != point_signs(i, 2)[1] for i in range(4)))


def kxor(k: int) -> Predicate:
    # satisfied when the product of the literals is -1, i.e. odd parity of bits
    return Predicate("%dxor" % k, k, tuple(bin(i).count("1") % 2 == 1 for i in range(1 << k)))


def ksat(k: int) -> Predicate:
    # fails only when every literal is -1
    return Predicate("%dsat" % k, k, tuple(i != (1 << k) - 1 for i in range(1 << k)))


def predicate_by_name(name: str, k: int) -> Predicate:
    if name == "maxcut":
        if k != 2:
            raise InputError("maxcut has arity 2")
        return maxcut()
    if name.endswith("xor"):
        return kxor(k)
    if name.endswith("sat"):
        return ksat(k)
    raise InputError("unknown predicate %r" % name)


@dataclass(frozen=True)
class Instance:
    """Constraints are (literals, parity) pairs; parity is 0 unless the predicate is XOR."""

    n: int
    constraints: tuple
    predicate: Predicate

    def __post_init__(self):
        if not self.constraints:
            raise InputError("instance has no constraints")
        clean = []
        for lits, parity in self.constraints:
            lits = tuple(int(v) for v in lits)
            if len(lits) != self.predicate.arity:
                raise InputError("constraint %s has arity %d, expected %d" % (lits, len(lits), self.predicate.arity))
            for v in lits:
                if v == 0 or abs(v) > self.n:
                    raise InputError("literal %d outside variables 1..%d" % (v, self.n))
            if parity not in (0, 1):
                raise InputError("parity must be 0 or 1")
            if parity and not self.predicate.is_xor:
                raise InputError("parity bit on a non-XOR constraint")
            clean.append((lits, int(parity)))
        object.__setattr__(self, "constraints", tuple(clean))

    @property
    def m(self) -> int:
        return len(self.constraints)

    def satisfied(self, x: Sequence[int]) -> int:
        count = 0
        for lits, parity in self.constraints:
            vals = [x[abs(v) - 1] * (1 if v > 0 else -1) for v in lits]
            if self.predicate.is_xor:
                bits = sum(1 for s in vals if s == -1) % 2
                count += bits == parity
            else:
                count += self.predicate(vals)
        return count


def eval_instance(inst: Instance, x: Sequence[int]) -> Fraction:
    if len(x) != inst.n:
        raise InputError("assignment has length %d, expected %d" % (len(x), inst.n))
    for s in x:
        if s not in (1, -1):
            raise InputError("assignment entries must be +1 or -1")
    return Fraction(inst.satisfied(x), inst.m)


def opt_brute(inst: Instance, cap: int = OPT_CAP) -> tuple[Fraction, tuple]:
    """Exact optimum; the argmax is the first optimal point in index order."""
    if inst.n > cap:
        raise ResourceError("n = %d exceeds brute-force cap %d" % (inst.n, cap))
    best, arg = -1, None
    for idx in range(1 << inst.n):
        x = point_signs(idx, inst.n)
        s = inst.satisfied(x)
        if s > best:
            best, arg = s, x
            if s == inst.m:
                break
    return Fraction(best, inst.m), arg


def encode_polynomial(inst: Instance) -> BooleanFunction:
    """P_I as a function on {-1,1}^n; its Fourier degree is at most k."""
    return BooleanFunction(inst.n, tuple(Fraction(inst.satisfied(point_signs(i, inst.n)), inst.m) for i in range(1 << inst.n)))


# ---------------------------------------------------------------- generators


def maxcut_graph(n: int, edges: Sequence[tuple[int, int]]) -> Instance:
    return Instance(n, tuple(((a, b), 0) for a, b in edges), maxcut())


def odd_cycle_xor(length: int) -> Instance:
    """x_i xor x_{i+1} = 1 around a cycle; unsatisfiable for odd length."""
    cons = tuple(((i + 1, (i + 1) % length + 1), 1) for i in range(length))
    return Instance(length, cons, kxor(2))


def random_kxor(n: int, m: int, k: int, seed: int) -> Instance:
    rng = random.Random(seed)
    cons = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), k)
        cons.append((tuple(vs), rng.randrange(2)))
    return Instance(n, tuple(cons), kxor(k))


def random_ksat(n: int, m: int, k: int, seed: int) -> Instance:
    rng = random.Random(seed)
    cons = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), k)
        cons.append((tuple(v if rng.randrange(2) else -v for v in vs), 0))
    return Instance(n, tuple(cons), ksat(k))


def generate(kind: str, params: dict, seed: int = 0) -> Instance:
    if kind == "maxcut-graph":
        edges = params["edges"]
        n = params.get("n", max(max(e) for e in edges))
        return maxcut_graph(n, edges)
    if kind == "random-kxor":
        return random_kxor(params["n"], params["m"], params.get("k", 3), seed)
    if kind == "random-ksat":
        return random_ksat(params["n"], params["m"], params.get("k", 3), seed)
    if kind == "odd-cycle-xor":
        return odd_cycle_xor(params["length"])
    raise InputError("unknown generator %r" % kind)


# ---------------------------------------------------------------- text format


def emit(inst: Instance) -> str:
    p = inst.predicate
    lines = ["c liftlab-csp v%d" % FORMAT_VERSION, "csp %s %d %d %d" % (p.name, p.arity, inst.n, inst.m)]
    for lits, parity in inst.constraints:
        parts = [str(v) for v in lits]
        if p.is_xor:
            parts.append(str(parity))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def parse(text: str) -> Instance:
    header = None
    cons = []
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c ") or line == "c" or line.startswith("#"):
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "csp" or len(parts) != 5:
                raise ParseError("expected header 'csp <predicate> <k> <n> <m>'", no)
            try:
                k, n, m = int(parts[2]), int(parts[3]), int(parts[4])
            except ValueError:
                raise ParseError("non-integer field in header", no) from None
            try:
                pred = predicate_by_name(parts[1], k)
            except InputError as exc:
                raise ParseError(str(exc), no) from None
            header = (pred, n, m)
            continue
        pred, n, m = header
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise ParseError("non-integer literal", no) from None
        want = pred.arity + (1 if pred.is_xor else 0)
        if len(nums) != want:
            raise ParseError("expected %d fields, found %d" % (want, len(nums)), no)
        lits = tuple(nums[: pred.arity])
        parity = nums[pred.arity] if pred.is_xor else 0
        for v in lits:
            if v == 0 or abs(v) > n:
                raise ParseError("literal %d outside 1..%d" % (v, n), no)
        if parity not in (0, 1):
            raise ParseError("parity bit must be 0 or 1", no)
        cons.append((lits, parity))
    if header is None:
        raise ParseError("missing header")
    pred, n, m = header
    if len(cons) != m:
        raise ParseError("header declares %d constraints, found %d" % (m, len(cons)))
    return Instance(n, tuple(cons), pred)
