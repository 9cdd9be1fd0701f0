"""Piecewise-constant densities on [q]^n x [q]^n with exact cell arithmetic.

Large alphabets (q = 2^20) rule out explicit tables, but every density the
decomposition touches is constant on products of *atoms*: per-block sets of
the form "aligned dyadic interval minus a finite set of points".  Splitting
an atom at a point yields a singleton and a smaller atom of the same form,
so conditioning on x_S = alpha or x_S != alpha never leaves the class.

A `Side` is a finite union of disjoint boxes (tuples of atoms, one per
block).  A block can be *pinned*: the side then stands for the family of
sets obtained by fixing that block to each single value of its atom.  This
is how one enumeration over beta in [q]^S collapses into a handful of
isomorphic representatives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .core import Density, PairDensity, block_point, frac
from .errors import InputError


def gadget_bit(a: int, b: int) -> int:
    """Exponent bit of the modified inner product: x_1 xor y_1 xor <x, y> mod 2.

    x_1 is the least significant bit of the block value.
    """
    return ((a ^ b) & 1) ^ (bin(a & b).count("1") & 1)


def gadget_value(a: int, b: int) -> int:
    return -1 if gadget_bit(a, b) else 1


@dataclass(frozen=True, order=True)
class Atom:
    """[lo, lo + 2^k) minus `excluded`; lo is a multiple of 2^k."""

    lo: int
    k: int
    excluded: frozenset = frozenset()

    def __post_init__(self):
        if self.lo % (1 << self.k):
            raise InputError("atom start %d is not aligned to 2^%d" % (self.lo, self.k))
        ex = frozenset(self.excluded)
        for e in ex:
            if not self.lo <= e < self.hi:
                raise InputError("excluded point %d outside the atom interval" % e)
        object.__setattr__(self, "excluded", ex)

    @classmethod
    def point(cls, a: int) -> "Atom":
        return cls(a, 0)

    @property
    def hi(self) -> int:
        return self.lo + (1 << self.k)

    @property
    def size(self) -> int:
        return (1 << self.k) - len(self.excluded)

    @property
    def is_point(self) -> bool:
        return self.size == 1

    def __contains__(self, a: int) -> bool:
        return self.lo <= a < self.hi and a not in self.excluded

    def first(self) -> int:
        a = self.lo
        while a in self.excluded:
            a += 1
        return a

    def only(self) -> int:
        if not self.is_point:
            raise InputError("atom is not a single point")
        return self.first()

    def elements(self) -> Iterable[int]:
        return (a for a in range(self.lo, self.hi) if a not in self.excluded)

    def without(self, a: int) -> "Atom | None":
        if a not in self:
            raise InputError("point %d not in atom" % a)
        if self.size == 1:
            return None
        return Atom(self.lo, self.k, self.excluded | {a})

    def intersects(self, other: "Atom") -> bool:
        small, big = (self, other) if self.k <= other.k else (other, self)
        if not big.lo <= small.lo < big.hi:
            return False
        blocked = small.excluded | {e for e in big.excluded if small.lo <= e < small.hi}
        return (1 << small.k) - len(blocked) > 0

    def intersection_size(self, other: "Atom") -> int:
        small, big = (self, other) if self.k <= other.k else (other, self)
        if not big.lo <= small.lo < big.hi:
            return 0
        blocked = small.excluded | {e for e in big.excluded if small.lo <= e < small.hi}
        return (1 << small.k) - len(blocked)

    def label(self) -> str:
        if self.is_point:
            return str(self.first())
        s = "[%d,%d)" % (self.lo, self.hi)
        if self.excluded:
            s += "-{%s}" % ",".join(str(e) for e in sorted(self.excluded))
        return s


def full_atom(b: int) -> Atom:
    return Atom(0, b)


def _interval_sign_sum(lo1: int, k1: int, lo2: int, k2: int, b: int) -> int:
    """Sum of g(a, c) over a in [lo1, lo1+2^k1), c in [lo2, lo2+2^k2)."""
    total = 1
    for t in range(b):
        free1, free2 = t < k1, t < k2
        v1 = (lo1 >> t) & 1
        v2 = (lo2 >> t) & 1
        if t == 0:
            # bit pair contributes (-1)^(a0 + c0 + a0 c0)
            if free1 and free2:
                f = 1 - 1 - 1 - 1
            elif free1:
                f = sum(-1 if (a ^ v2) ^ (a & v2) else 1 for a in (0, 1))
            elif free2:
                f = sum(-1 if (v1 ^ c) ^ (v1 & c) else 1 for c in (0, 1))
            else:
                f = -1 if (v1 ^ v2) ^ (v1 & v2) else 1
        else:
            if free1 and free2:
                f = 2
            elif free1:
                f = 0 if v2 else 2
            elif free2:
                f = 0 if v1 else 2
            else:
                f = -1 if v1 & v2 else 1
        if f == 0:
            return 0
        total *= f
    return total


def sign_sum(x: Atom, y: Atom, b: int) -> int:
    """Exact sum of g over the product x * y, by inclusion-exclusion on excluded points."""
    s = _interval_sign_sum(x.lo, x.k, y.lo, y.k, b)
    for e in x.excluded:
        s -= _interval_sign_sum(e, 0, y.lo, y.k, b)
    for f in y.excluded:
        s -= _interval_sign_sum(x.lo, x.k, f, 0, b)
    for e in x.excluded:
        for f in y.excluded:
            s += gadget_value(e, f)
    return s


def plus_count(x: Atom, y: Atom, b: int) -> int:
    """Number of pairs in x * y with g = +1."""
    return (x.size * y.size + sign_sum(x, y, b)) // 2


def dyadic_partition(b: int, cuts: Sequence[int]) -> list[Atom]:
    """Split [2^b] into aligned dyadic intervals; `cuts` lists interval exponents in order."""
    out, lo = [], 0
    for k in cuts:
        out.append(Atom(lo, k))
        lo += 1 << k
    if lo != 1 << b:
        raise InputError("dyadic cuts do not cover [2^%d]" % b)
    return out


def random_dyadic_partition(rng, b: int, pieces: int) -> list[Atom]:
    """Recursively halve random intervals until there are `pieces` atoms."""
    parts = [(0, b)]
    while len(parts) < pieces:
        splittable = [p for p in parts if p[1] > 0]
        if not splittable:
            break
        lo, k = rng.choice(splittable)
        parts.remove((lo, k))
        parts += [(lo, k - 1), (lo + (1 << (k - 1)), k - 1)]
    return [Atom(lo, k) for lo, k in sorted(parts)]


# ---------------------------------------------------------------- sides


@dataclass(frozen=True)
class Side:
    """A union of disjoint boxes over a per-block atom partition.

    `partition[i]` lists the atoms of block i; boxes are tuples of atom
    indices.  `base[i][j]` is the index of the density cell holding atom j.
    `pinned` is a frozenset of blocks that range over a family.
    """

    partition: tuple
    base: tuple
    boxes: frozenset
    pinned: frozenset = frozenset()

    @property
    def n(self) -> int:
        return len(self.partition)

    def atom(self, i: int, j: int) -> Atom:
        return self.partition[i][j]

    def box_atoms(self, box) -> tuple:
        return tuple(self.partition[i][j] for i, j in enumerate(box))

    def member_count(self, box) -> int:
        c = 1
        for i, j in enumerate(box):
            if i not in self.pinned:
                c *= self.partition[i][j].size
        return c

    def multiplicity(self) -> int:
        """Number of family members (1 when nothing is pinned)."""
        m = 1
        for i in self.pinned:
            js = {box[i] for box in self.boxes}
            if len(js) != 1:
                raise InputError("pinned block %d is not constant across boxes" % i)
            m *= self.partition[i][js.pop()].size
        return m

    def counts_by_cell(self) -> dict:
        out = {}
        for box in self.boxes:
            key = tuple(self.base[i][j] for i, j in enumerate(box))
            out[key] = out.get(key, 0) + self.member_count(box)
        return out

    def point_count(self) -> int:
        return sum(self.member_count(b) for b in self.boxes) * (self.multiplicity() if self.boxes else 0)

    def _split(self, i: int, a: int) -> tuple["Side", int]:
        """Refine block i so that {a} is its own atom; returns the new side and that atom's index."""
        part = list(self.partition[i])
        for j, at in enumerate(part):
            if a in at:
                break
        else:
            raise InputError("value %d not covered by block %d" % (a, i))
        if at.is_point:
            return self, j
        rest = at.without(a)
        part[j] = rest
        part.append(Atom.point(a))
        new_j = len(part) - 1
        base_i = list(self.base[i]) + [self.base[i][j]]
        boxes = set()
        for box in self.boxes:
            if box[i] == j:
                boxes.add(box)
                boxes.add(box[:i] + (new_j,) + box[i + 1:])
            else:
                boxes.add(box)
        partition = self.partition[:i] + (tuple(part),) + self.partition[i + 1:]
        base = self.base[:i] + (tuple(base_i),) + self.base[i + 1:]
        return Side(partition, base, frozenset(boxes), self.pinned), new_j

    def restrict(self, coords: Sequence[int], values: Sequence[int], equal: bool) -> "Side":
        """Points with x_S = alpha (equal) or x_S != alpha (not equal)."""
        side = self
        idx = {}
        for i, a in zip(coords, values):
            side, idx[i] = side._split(i, a)
        keep = set()
        for box in side.boxes:
            hit = all(box[i] == idx[i] for i in coords)
            if hit == equal:
                keep.add(box)
        return Side(side.partition, side.base, frozenset(keep), side.pinned)

    def family(self, coords: Sequence[int], atom_idx: Sequence[int]) -> "Side":
        """Boxes whose blocks `coords` sit in the given atoms, with those blocks pinned."""
        keep = frozenset(b for b in self.boxes if all(b[i] == j for i, j in zip(coords, atom_idx)))
        return Side(self.partition, self.base, keep, self.pinned | frozenset(coords))

    def block_atoms_used(self, i: int) -> list[int]:
        return sorted({b[i] for b in self.boxes})

    def fixed_value(self, i: int):
        """The single atom index used on block i, or None."""
        js = {b[i] for b in self.boxes}
        return js.pop() if len(js) == 1 else None

    def contains(self, point: Sequence[int]) -> bool:
        for box in self.boxes:
            if all(point[i] in self.partition[i][j] for i, j in enumerate(box)):
                return True
        return False

    def describe(self) -> list:
        out = []
        for box in sorted(self.boxes):
            out.append([("*" if i in self.pinned else "") + self.partition[i][j].label() for i, j in enumerate(box)])
        return out


def full_side(cells: Sequence[Sequence[Atom]]) -> Side:
    partition = tuple(tuple(c) for c in cells)
    base = tuple(tuple(range(len(c))) for c in cells)
    boxes = frozenset(itertools.product(*[range(len(c)) for c in cells]))
    return Side(partition, base, boxes)


def sides_intersect(s1: Side, s2: Side) -> bool:
    for b1 in s1.boxes:
        a1 = s1.box_atoms(b1)
        for b2 in s2.boxes:
            a2 = s2.box_atoms(b2)
            if all(x.intersects(y) for x, y in zip(a1, a2)):
                return True
    return False


# ---------------------------------------------------------------- densities


@dataclass(frozen=True)
class CellPairDensity:
    """Density on [q]^n x [q]^n constant on products of base cells.

    `weights` maps (x cell tuple, y cell tuple) to the probability of each
    single point (x, y) in that product; missing keys are zero.  When
    `x_weights`/`y_weights` are given the density is their product.
    """

    b: int
    x_cells: tuple
    y_cells: tuple
    weights: dict = field(default_factory=dict)
    x_weights: dict = None
    y_weights: dict = None

    def __post_init__(self):
        object.__setattr__(self, "x_cells", tuple(tuple(c) for c in self.x_cells))
        object.__setattr__(self, "y_cells", tuple(tuple(c) for c in self.y_cells))
        for cells in self.x_cells + self.y_cells:
            if sum(a.size for a in cells) != self.q:
                raise InputError("cells of a block do not cover [q]")
        if self.x_weights is not None:
            xw = {tuple(k): frac(v) for k, v in self.x_weights.items() if v}
            yw = {tuple(k): frac(v) for k, v in self.y_weights.items() if v}
            object.__setattr__(self, "x_weights", xw)
            object.__setattr__(self, "y_weights", yw)
            w = {(kx, ky): vx * vy for kx, vx in xw.items() for ky, vy in yw.items()}
            object.__setattr__(self, "weights", w)
        else:
            object.__setattr__(self, "weights", {(tuple(kx), tuple(ky)): frac(v) for (kx, ky), v in self.weights.items() if v})
        total = Fraction(0)
        for (kx, ky), v in self.weights.items():
            if v < 0:
                raise InputError("negative point probability")
            total += v * self._cell_size(self.x_cells, kx) * self._cell_size(self.y_cells, ky)
        if total != 1:
            raise InputError("cell density has total probability %s, not 1" % total)

    @property
    def q(self) -> int:
        return 1 << self.b

    @property
    def n(self) -> int:
        return len(self.x_cells)

    @property
    def is_product(self) -> bool:
        return self.x_weights is not None

    @staticmethod
    def _cell_size(cells, key) -> int:
        s = 1
        for i, j in enumerate(key):
            s *= cells[i][j].size
        return s

    @classmethod
    def uniform(cls, b: int, n: int) -> "CellPairDensity":
        cells = tuple((full_atom(b),) for _ in range(n))
        q = 1 << b
        p = Fraction(1, q ** n)
        return cls(b, cells, cells, x_weights={(0,) * n: p}, y_weights={(0,) * n: p})

    @classmethod
    def product(cls, b: int, x_cells, x_mass: dict, y_cells, y_mass: dict) -> "CellPairDensity":
        """Product of two cell densities given by non-negative total masses per cell tuple."""

        def per_point(cells, mass):
            total = sum((frac(v) for v in mass.values()), Fraction(0))
            return {tuple(k): frac(v) / total / cls._cell_size(cells, k) for k, v in mass.items() if v}

        return cls(b, x_cells, y_cells, x_weights=per_point(x_cells, x_mass), y_weights=per_point(y_cells, y_mass))

    @classmethod
    def from_pair_density(cls, mu: PairDensity) -> "CellPairDensity":
        b = mu.q.bit_length() - 1
        cells = tuple(tuple(Atom.point(a) for a in range(mu.q)) for _ in range(mu.n))
        w = {}
        side = mu.side
        total = len(mu.mass)
        for idx, m in enumerate(mu.mass):
            if m:
                yi, xi = divmod(idx, side)
                w[(block_point(xi, mu.q, mu.n), block_point(yi, mu.q, mu.n))] = m / total
        return cls(b, cells, cells, w)

    @classmethod
    def from_densities(cls, u: Density, v: Density) -> "CellPairDensity":
        b = u.q.bit_length() - 1
        cells = tuple(tuple(Atom.point(a) for a in range(u.q)) for _ in range(u.n))
        xw = {block_point(i, u.q, u.n): m / u.size for i, m in enumerate(u.mass) if m}
        yw = {block_point(i, v.q, v.n): m / v.size for i, m in enumerate(v.mass) if m}
        return cls(b, cells, cells, x_weights=xw, y_weights=yw)

    def full_sides(self) -> tuple[Side, Side]:
        return full_side(self.x_cells), full_side(self.y_cells)

    def probability(self, x: Sequence[int], y: Sequence[int]) -> Fraction:
        kx = tuple(next(j for j, a in enumerate(self.x_cells[i]) if x[i] in a) for i in range(self.n))
        ky = tuple(next(j for j, a in enumerate(self.y_cells[i]) if y[i] in a) for i in range(self.n))
        return self.weights.get((kx, ky), Fraction(0))

    # ---- rectangle queries; sizes are member counts of the (possibly pinned) sides

    def mass(self, A: Side, B: Side) -> Fraction:
        """Probability of one member rectangle A x B."""
        ca, cb = A.counts_by_cell(), B.counts_by_cell()
        if self.is_product:
            sa = sum((self.x_weights.get(k, 0) * c for k, c in ca.items()), Fraction(0))
            sb = sum((self.y_weights.get(k, 0) * c for k, c in cb.items()), Fraction(0))
            return sa * sb
        total = Fraction(0)
        for kx, nx in ca.items():
            for ky, ny in cb.items():
                w = self.weights.get((kx, ky))
                if w:
                    total += w * nx * ny
        return total

    def side_weights(self, A: Side, B: Side, which: str) -> dict:
        """Per-point marginal weight of each cell tuple on one side, unnormalized."""
        own, other = (A, B) if which == "x" else (B, A)
        co = other.counts_by_cell()
        if self.is_product:
            ow = self.y_weights if which == "x" else self.x_weights
            scale = sum((ow.get(k, 0) * c for k, c in co.items()), Fraction(0))
            mine = self.x_weights if which == "x" else self.y_weights
            return {k: v * scale for k, v in mine.items()}
        out = {}
        for (kx, ky), w in self.weights.items():
            k_own, k_other = (kx, ky) if which == "x" else (ky, kx)
            c = co.get(k_other)
            if c:
                out[k_own] = out.get(k_own, 0) + w * c
        return out

    def marginal_on(self, A: Side, B: Side, which: str, coords: Sequence[int]) -> dict:
        """Pr[X_S in atom tuple] per single point of the atom tuple, conditioned on A x B.

        Returns {atom index tuple on coords: per-point probability}.
        """
        own = A if which == "x" else B
        total = self.mass(A, B)
        if total == 0:
            return {}
        w = self.side_weights(A, B, which)
        out = {}
        for box in own.boxes:
            key_cell = tuple(own.base[i][j] for i, j in enumerate(box))
            pw = w.get(key_cell)
            if not pw:
                continue
            rest = 1
            for i, j in enumerate(box):
                if i not in coords and i not in own.pinned:
                    rest *= own.partition[i][j].size
            k = tuple(box[i] for i in coords)
            out[k] = out.get(k, 0) + pw * rest
        return {k: v / total for k, v in out.items()}

    def to_pair_density(self) -> PairDensity:
        """Explicit table; only for small q^n."""
        q, n = self.q, self.n
        side = q ** n
        if side * side > 1 << 22:
            raise InputError("explicit table would have %d entries" % (side * side))
        vals = []
        pts = [block_point(i, q, n) for i in range(side)]
        for yi in range(side):
            for xi in range(side):
                vals.append(self.probability(pts[xi], pts[yi]) * side * side)
        return PairDensity(q, n, tuple(vals))


def plant_point(cells: Sequence[Atom], index: int, point: int) -> list[Atom]:
    """Carve a single point out of atom `index`, appending it as its own cell."""
    atom = cells[index]
    if point not in atom:
        raise InputError("point %d is not in atom %s" % (point, atom.label()))
    rest = atom.without(point)
    out = list(cells)
    out[index] = rest
    out.append(Atom.point(point))
    return out


def random_cell_density(rng, b: int, n: int, pieces: int = 4, planted: int = 0, planted_mass=Fraction(1, 2 ** 14)) -> CellPairDensity:
    """Random product density, constant on random dyadic cells, with optional planted point masses.

    Each side draws integer weights 1..4 per cell tuple.  A planted point
    receives `planted_mass` of its side's probability, so it breaks
    blockwise density when that mass is far above q^(-0.8).
    """
    planted_mass = frac(planted_mass)

    def side():
        cells = [random_dyadic_partition(rng, b, rng.randint(1, pieces)) for _ in range(n)]
        spots = []
        for _ in range(planted):
            i = rng.randrange(n)
            j = rng.randrange(len(cells[i]))
            atom = cells[i][j]
            if atom.size < 2:
                continue
            p = rng.choice([a for a in (atom.lo, atom.lo + 1, atom.hi - 1) if a in atom])
            cells[i] = plant_point(cells[i], j, p)
            spots.append((i, len(cells[i]) - 1))
        keys = list(itertools.product(*[range(len(c)) for c in cells]))
        mass = {k: Fraction(rng.randint(1, 4)) for k in keys}
        for i, j in spots:
            hit = [k for k in keys if k[i] == j]
            # rescale so the planted keys carry planted_mass in total
            rest = sum((mass[k] for k in keys if k[i] != j), Fraction(0))
            cur = sum((mass[k] for k in hit), Fraction(0))
            for k in hit:
                mass[k] = mass[k] / cur * planted_mass / (1 - planted_mass) * rest
        return cells, mass

    xc, xm = side()
    yc, ym = side()
    return CellPairDensity.product(b, xc, xm, yc, ym)


@dataclass(frozen=True)
class CellDensity:
    """One-sided density on [q]^n, constant on products of cells.

    `mass` maps cell tuples to their total probability (summing to 1).
    """

    b: int
    cells: tuple
    mass: dict

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(tuple(c) for c in self.cells))
        m = {tuple(k): frac(v) for k, v in self.mass.items() if v}
        total = sum(m.values(), Fraction(0))
        if total != 1:
            raise InputError("cell masses sum to %s, not 1" % total)
        if any(v < 0 for v in m.values()):
            raise InputError("negative cell mass")
        for cells in self.cells:
            if sum(a.size for a in cells) != 1 << self.b:
                raise InputError("cells of a block do not cover [q]")
        object.__setattr__(self, "mass", m)

    @property
    def q(self) -> int:
        return 1 << self.b

    @property
    def n(self) -> int:
        return len(self.cells)

    def cell_size(self, key) -> int:
        s = 1
        for i, j in enumerate(key):
            s *= self.cells[i][j].size
        return s

    def point_weights(self) -> dict:
        return {k: v / self.cell_size(k) for k, v in self.mass.items()}

    def max_probability(self) -> Fraction:
        return max(self.point_weights().values())

    def probability(self, x: Sequence[int]) -> Fraction:
        key = []
        for i, a in enumerate(x):
            for j, atom in enumerate(self.cells[i]):
                if a in atom:
                    key.append(j)
                    break
        return self.point_weights().get(tuple(key), Fraction(0))

    def value(self, x: Sequence[int]) -> Fraction:
        """Density value (mean-1 normalization)."""
        return self.probability(x) * self.q ** self.n

    def to_density(self) -> Density:
        q, n = self.q, self.n
        return Density(q, n, tuple(self.value(block_point(i, q, n)) for i in range(q ** n)))

    @classmethod
    def from_density(cls, u: Density) -> "CellDensity":
        b = u.q.bit_length() - 1
        cells = tuple(tuple(Atom.point(a) for a in range(u.q)) for _ in range(u.n))
        return cls(b, cells, {block_point(i, u.q, u.n): m / u.size for i, m in enumerate(u.mass) if m})

    @classmethod
    def uniform(cls, b: int, n: int) -> "CellDensity":
        return cls(b, tuple((full_atom(b),) for _ in range(n)), {(0,) * n: 1})

    @classmethod
    def on_cells(cls, b: int, cells, support: Sequence) -> "CellDensity":
        """Uniform on the union of the listed cell tuples."""
        cells = tuple(tuple(c) for c in cells)
        sizes = {tuple(k): 1 for k in support}
        tmp = {k: Fraction(cls._size(cells, k)) for k in sizes}
        total = sum(tmp.values(), Fraction(0))
        return cls(b, cells, {k: v / total for k, v in tmp.items()})

    @staticmethod
    def _size(cells, key) -> int:
        s = 1
        for i, j in enumerate(key):
            s *= cells[i][j].size
        return s


def product_of(u: CellDensity, v: CellDensity) -> CellPairDensity:
    if u.b != v.b or u.n != v.n:
        raise InputError("sides live on different domains")
    return CellPairDensity.product(u.b, u.cells, u.mass, v.cells, v.mass)
