"""Exact Boolean-function and density arithmetic.

Points of {-1,1}^n are indexed by integers: bit i of the index is 0 for
x_i = +1 and 1 for x_i = -1.  Subsets of [n] are bitmasks over the same
bit positions, so chi_S(x) = (-1)^popcount(x & S).

Points of [q]^n are indexed little-endian as sum_i x_i * q^i.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DomainError, InputError, ResourceError

Rational = Fraction

DEFAULT_FWHT_CAP = 20
ENTROPY_DENOMS = (1, 5, 10, 20)


def frac(x) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction; reject floats."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        raise InputError("floating point value %r is not accepted; use a rational" % (x,))
    try:
        return Fraction(x.numerator, x.denominator)
    except AttributeError:
        raise InputError("cannot interpret %r as a rational" % (x,)) from None


def popcount(x: int) -> int:
    return bin(x).count("1")


def mask_of(subset: Iterable[int]) -> int:
    m = 0
    for i in subset:
        m |= 1 << i
    return m


def members(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def chi(mask: int, point: int) -> int:
    return -1 if popcount(mask & point) & 1 else 1


def point_signs(index: int, n: int) -> tuple[int, ...]:
    return tuple(-1 if (index >> i) & 1 else 1 for i in range(n))


def point_index(signs: Sequence[int]) -> int:
    idx = 0
    for i, s in enumerate(signs):
        if s == -1:
            idx |= 1 << i
        elif s != 1:
            raise InputError("coordinate %d is %r, expected +1 or -1" % (i, s))
    return idx


def subsets_upto(n: int, d: int) -> list[int]:
    """Bitmasks of all subsets of [n] with at most d elements, by size then lexicographic."""
    out = []
    for k in range(0, min(d, n) + 1):
        for combo in itertools.combinations(range(n), k):
            out.append(mask_of(combo))
    return out


def pow2_le(x: Fraction, exponent: Fraction) -> bool:
    """Exact test of 0 <= x <= 2**exponent for a rational exponent p/r.

    Raises both sides to the power r, so fractional thresholds such as
    q**(-0.8|S|) compare without rounding.
    """
    x = frac(x)
    if x < 0:
        return True
    exponent = frac(exponent)
    r = exponent.denominator
    p = exponent.numerator
    lhs = x ** r
    return lhs <= (Fraction(2) ** p)


def pow2_ge(x: Fraction, exponent: Fraction) -> bool:
    """Exact test of x >= 2**exponent (x >= 0)."""
    x = frac(x)
    if x < 0:
        return False
    exponent = frac(exponent)
    return x ** exponent.denominator >= Fraction(2) ** exponent.numerator


@dataclass(frozen=True)
class Verdict:
    """Outcome of an exact check; `witness` locates the first failure."""

    ok: bool
    reason: str = ""
    witness: object = None

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------- functions


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    values: tuple

    def __post_init__(self):
        vals = tuple(frac(v) for v in self.values)
        if len(vals) != 1 << self.n:
            raise InputError("table length %d does not match 2^%d" % (len(vals), self.n))
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, n: int, c=1) -> "BooleanFunction":
        return cls(n, (frac(c),) * (1 << n))

    @classmethod
    def from_callable(cls, n: int, fn: Callable[[tuple], object]) -> "BooleanFunction":
        return cls(n, tuple(frac(fn(point_signs(i, n))) for i in range(1 << n)))

    @classmethod
    def parity(cls, n: int, subset: Iterable[int]) -> "BooleanFunction":
        m = mask_of(subset)
        return cls(n, tuple(Fraction(chi(m, i)) for i in range(1 << n)))

    @classmethod
    def coordinate(cls, n: int, i: int) -> "BooleanFunction":
        return cls.parity(n, [i])

    def __call__(self, point) -> Fraction:
        if isinstance(point, int):
            return self.values[point]
        return self.values[point_index(point)]

    def _check(self, other: "BooleanFunction"):
        if other.n != self.n:
            raise InputError("dimension mismatch: %d vs %d" % (self.n, other.n))

    def __add__(self, other):
        if isinstance(other, BooleanFunction):
            self._check(other)
            return BooleanFunction(self.n, tuple(a + b for a, b in zip(self.values, other.values)))
        c = frac(other)
        return BooleanFunction(self.n, tuple(a + c for a in self.values))

    __radd__ = __add__

    def __neg__(self):
        return BooleanFunction(self.n, tuple(-a for a in self.values))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BooleanFunction):
            self._check(other)
            return BooleanFunction(self.n, tuple(a * b for a, b in zip(self.values, other.values)))
        c = frac(other)
        return BooleanFunction(self.n, tuple(a * c for a in self.values))

    __rmul__ = __mul__

    def mean(self) -> Fraction:
        return sum(self.values, Fraction(0)) / (1 << self.n)

    def inner(self, other: "BooleanFunction") -> Fraction:
        """E[f g] under the uniform measure."""
        self._check(other)
        return sum((a * b for a, b in zip(self.values, other.values)), Fraction(0)) / (1 << self.n)

    def min(self) -> Fraction:
        return min(self.values)

    def max(self) -> Fraction:
        return max(self.values)

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for v in self.values)

    @cached_property
    def spectrum(self) -> "FourierSpectrum":
        return fwht(self, cap=max(self.n, DEFAULT_FWHT_CAP))

    def degree(self) -> int:
        return self.spectrum.degree()

    def linf(self) -> Fraction:
        return max(abs(v) for v in self.values)


@dataclass(frozen=True)
class FourierSpectrum:
    n: int
    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for m, c in self.coeffs.items():
            m = int(m)
            if m < 0 or m >= 1 << self.n:
                raise InputError("subset mask %d outside [n] for n=%d" % (m, self.n))
            c = frac(c)
            if c != 0:
                clean[m] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    def __getitem__(self, subset) -> Fraction:
        m = subset if isinstance(subset, int) else mask_of(subset)
        return self.coeffs.get(m, Fraction(0))

    def items(self):
        return self.coeffs.items()

    def degree(self) -> int:
        return max((popcount(m) for m in self.coeffs), default=0)

    def parseval(self) -> Fraction:
        return sum((c * c for c in self.coeffs.values()), Fraction(0))

    def to_function(self) -> BooleanFunction:
        return inverse_fwht(self)

    def __eq__(self, other):
        return isinstance(other, FourierSpectrum) and self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, tuple(self.coeffs.items())))


def _butterfly(vals: list, n: int) -> list:
    h = 1
    size = 1 << n
    while h < size:
        for start in range(0, size, h << 1):
            for j in range(start, start + h):
                a, b = vals[j], vals[j + h]
                vals[j], vals[j + h] = a + b, a - b
        h <<= 1
    return vals


def fwht(f: BooleanFunction, cap: int = DEFAULT_FWHT_CAP) -> FourierSpectrum:
    """Exact Walsh-Hadamard transform: coefficient of S is E[f chi_S]."""
    if f.n > cap:
        raise ResourceError("dimension %d exceeds transform cap %d" % (f.n, cap))
    vals = _butterfly(list(f.values), f.n)
    scale = 1 << f.n
    return FourierSpectrum(f.n, {m: v / scale for m, v in enumerate(vals) if v})


def inverse_fwht(spec: FourierSpectrum) -> BooleanFunction:
    vals = [Fraction(0)] * (1 << spec.n)
    for m, c in spec.coeffs.items():
        vals[m] = c
    return BooleanFunction(spec.n, tuple(_butterfly(vals, spec.n)))


def is_eps_decaying(h: BooleanFunction, eps_exponent) -> Verdict:
    """h is eps-decaying for eps = 2^-e: mean zero and |h^(S)| <= eps^|S|.

    Coefficients are squared and raised to the denominator of e so the
    comparison stays in the rationals.  The witness is the first failing
    subset mask (the empty set when the mean is nonzero).
    """
    e = frac(eps_exponent)
    spec = h.spectrum
    if spec[0] != 0:
        return Verdict(False, "mean is %s, not 0" % spec[0], 0)
    for m, c in spec.items():
        if not pow2_le(c * c, -2 * e * popcount(m)):
            return Verdict(False, "coefficient %s on subset %s exceeds 2^-%s|S|" % (c, members(m), e), m)
    return Verdict(True)


# ---------------------------------------------------------------- juntas


@dataclass(frozen=True, order=True)
class Conjunction:
    """Mean-one indicator 2^|I| * 1[x_I = alpha]; `fixed` lists (variable, sign)."""

    fixed: tuple = ()

    def __post_init__(self):
        items = tuple(sorted((int(i), int(s)) for i, s in dict(self.fixed).items()))
        if len(items) != len(self.fixed):
            raise InputError("conjunction fixes a variable twice")
        for i, s in items:
            if s not in (1, -1) or i < 0:
                raise InputError("bad literal (%r, %r)" % (i, s))
        object.__setattr__(self, "fixed", items)

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "Conjunction":
        return cls(tuple(mapping.items()))

    @property
    def width(self) -> int:
        return len(self.fixed)

    @property
    def support(self) -> int:
        return mask_of(i for i, _ in self.fixed)

    @property
    def pattern(self) -> int:
        """Bitmask of variables fixed to -1."""
        return mask_of(i for i, s in self.fixed if s == -1)

    def __call__(self, point) -> Fraction:
        idx = point if isinstance(point, int) else point_index(point)
        if idx & self.support == self.pattern:
            return Fraction(1 << self.width)
        return Fraction(0)

    def as_function(self, n: int) -> BooleanFunction:
        if self.support >> n:
            raise InputError("conjunction uses a variable outside [%d]" % n)
        sup, pat, val = self.support, self.pattern, Fraction(1 << self.width)
        return BooleanFunction(n, tuple(val if i & sup == pat else Fraction(0) for i in range(1 << n)))


@dataclass(frozen=True)
class ConicalJuntaRep:
    terms: tuple = ()

    def __post_init__(self):
        clean = []
        for w, c in self.terms:
            w = frac(w)
            if w < 0:
                raise InputError("negative weight %s in conical junta" % w)
            if not isinstance(c, Conjunction):
                c = Conjunction(tuple(c))
            clean.append((w, c))
        object.__setattr__(self, "terms", tuple(clean))

    def __call__(self, point) -> Fraction:
        return sum((w * c(point) for w, c in self.terms), Fraction(0))

    def as_function(self, n: int) -> BooleanFunction:
        vals = [Fraction(0)] * (1 << n)
        for w, c in self.terms:
            if w == 0:
                continue
            if c.support >> n:
                raise InputError("conjunction uses a variable outside [%d]" % n)
            val = w * (1 << c.width)
            sup, pat = c.support, c.pattern
            for i in range(1 << n):
                if i & sup == pat:
                    vals[i] += val
        return BooleanFunction(n, tuple(vals))

    def total_weight(self) -> Fraction:
        return sum((w for w, _ in self.terms), Fraction(0))

    def width(self) -> int:
        return max((c.width for _, c in self.terms), default=0)


def eval_conical_junta(rep: ConicalJuntaRep, point) -> Fraction:
    return rep(point)


def all_conjunctions(n: int, d: int) -> list[Conjunction]:
    """Every conjunction of width <= d, by support (size then lexicographic) then pattern."""
    out = []
    for sup in subsets_upto(n, d):
        vs = members(sup)
        for pat_bits in range(1 << len(vs)):
            out.append(Conjunction(tuple((v, -1 if (pat_bits >> k) & 1 else 1) for k, v in enumerate(vs))))
    return out


# ---------------------------------------------------------------- densities


def block_index(x: Sequence[int], q: int) -> int:
    idx = 0
    for i, xi in enumerate(x):
        if not 0 <= xi < q:
            raise InputError("block value %r outside [%d]" % (xi, q))
        idx += xi * q ** i
    return idx


def block_point(idx: int, q: int, n: int) -> tuple[int, ...]:
    out = []
    for _ in range(n):
        idx, r = divmod(idx, q)
        out.append(r)
    return tuple(out)


def _check_q(q: int):
    if q < 2 or q & (q - 1):
        raise InputError("alphabet size %d is not a power of two >= 2" % q)


@dataclass(frozen=True)
class Density:
    """Non-negative function on [q]^n with uniform mean exactly 1."""

    q: int
    n: int
    mass: tuple

    def __post_init__(self):
        _check_q(self.q)
        vals = tuple(frac(v) for v in self.mass)
        if len(vals) != self.q ** self.n:
            raise InputError("density table has %d entries, expected %d" % (len(vals), self.q ** self.n))
        if any(v < 0 for v in vals):
            raise InputError("density has a negative entry")
        if sum(vals, Fraction(0)) != len(vals):
            raise InputError("density mean is not 1")
        object.__setattr__(self, "mass", vals)

    @property
    def size(self) -> int:
        return self.q ** self.n

    @property
    def b(self) -> int:
        return self.q.bit_length() - 1

    @classmethod
    def uniform(cls, q: int, n: int) -> "Density":
        return cls(q, n, (Fraction(1),) * q ** n)

    @classmethod
    def from_weights(cls, q: int, n: int, weights: Sequence) -> "Density":
        w = [frac(v) for v in weights]
        total = sum(w, Fraction(0))
        if total <= 0:
            raise DomainError("weights have no positive mass")
        scale = Fraction(len(w)) / total
        return cls(q, n, tuple(v * scale for v in w))

    @classmethod
    def uniform_on(cls, q: int, n: int, points: Iterable) -> "Density":
        w = [0] * q ** n
        for p in points:
            w[p if isinstance(p, int) else block_index(p, q)] = 1
        return cls.from_weights(q, n, w)

    @classmethod
    def point_mass(cls, q: int, n: int, point) -> "Density":
        return cls.uniform_on(q, n, [point])

    def probability(self, point) -> Fraction:
        idx = point if isinstance(point, int) else block_index(point, self.q)
        return self.mass[idx] / self.size

    def probabilities(self) -> tuple:
        s = self.size
        return tuple(m / s for m in self.mass)

    def max_probability(self) -> tuple[Fraction, tuple]:
        """Largest point probability and the first point attaining it."""
        best = max(self.mass)
        idx = self.mass.index(best)
        return best / self.size, block_point(idx, self.q, self.n)

    def marginal(self, coords: Sequence[int]) -> "Density":
        coords = tuple(coords)
        k = len(coords)
        acc = [Fraction(0)] * self.q ** k
        for idx, m in enumerate(self.mass):
            if m:
                x = block_point(idx, self.q, self.n)
                acc[block_index([x[c] for c in coords], self.q)] += m
        # marginal mass per point scales by q^(n-k) relative to the parent table
        scale = Fraction(1, self.q ** (self.n - k))
        return Density(self.q, k, tuple(a * scale for a in acc))

    def condition(self, coords: Sequence[int], values: Sequence[int]) -> "Density":
        coords, values = tuple(coords), tuple(values)
        w = []
        for idx, m in enumerate(self.mass):
            x = block_point(idx, self.q, self.n)
            w.append(m if all(x[c] == v for c, v in zip(coords, values)) else 0)
        if not any(w):
            raise DomainError("conditioning event x_%s = %s has zero mass" % (coords, values))
        return Density.from_weights(self.q, self.n, w)

    def min_entropy_at_least(self, k: int, denom: int = 1) -> Verdict:
        return min_entropy_cmp(self, (k, denom))


def min_entropy_cmp(u, threshold) -> Verdict:
    """H_inf(u) >= k/denom bits, decided as max Pr^denom <= 2^-k."""
    k, denom = threshold
    if denom not in ENTROPY_DENOMS:
        raise InputError("threshold denominator %r not in %s" % (denom, ENTROPY_DENOMS))
    p, x = u.max_probability()
    if p ** denom <= Fraction(2) ** (-k):
        return Verdict(True)
    return Verdict(False, "point %s has probability %s" % (x, p), x)


@dataclass(frozen=True)
class PairDensity:
    """Non-negative mean-one function on [q]^n x [q]^n.

    Entry (x, y) sits at index x_index + q^n * y_index.
    """

    q: int
    n: int
    mass: tuple

    def __post_init__(self):
        _check_q(self.q)
        vals = tuple(frac(v) for v in self.mass)
        if len(vals) != self.q ** (2 * self.n):
            raise InputError("pair density table has %d entries, expected %d" % (len(vals), self.q ** (2 * self.n)))
        if any(v < 0 for v in vals):
            raise InputError("pair density has a negative entry")
        if sum(vals, Fraction(0)) != len(vals):
            raise InputError("pair density mean is not 1")
        object.__setattr__(self, "mass", vals)

    @property
    def side(self) -> int:
        return self.q ** self.n

    @classmethod
    def uniform(cls, q: int, n: int) -> "PairDensity":
        return cls(q, n, (Fraction(1),) * q ** (2 * n))

    @classmethod
    def product(cls, u: Density, v: Density) -> "PairDensity":
        if (u.q, u.n) != (v.q, v.n):
            raise InputError("product of densities over different domains")
        return cls(u.q, u.n, tuple(a * b for b in v.mass for a in u.mass))

    @classmethod
    def from_weights(cls, q: int, n: int, weights: Sequence) -> "PairDensity":
        w = [frac(v) for v in weights]
        total = sum(w, Fraction(0))
        if total <= 0:
            raise DomainError("weights have no positive mass")
        scale = Fraction(len(w)) / total
        return cls(q, n, tuple(v * scale for v in w))

    def probability(self, x, y) -> Fraction:
        xi = x if isinstance(x, int) else block_index(x, self.q)
        yi = y if isinstance(y, int) else block_index(y, self.q)
        return self.mass[xi + self.side * yi] / len(self.mass)

    def marginal_x(self) -> Density:
        s = self.side
        return Density(self.q, self.n, tuple(sum(self.mass[x + s * y] for y in range(s)) / s for x in range(s)))

    def marginal_y(self) -> Density:
        s = self.side
        return Density(self.q, self.n, tuple(sum(self.mass[x + s * y] for x in range(s)) / s for y in range(s)))

    def project(self, coords: Sequence[int]) -> "PairDensity":
        """mu_I: the joint law of (X_I, Y_I)."""
        coords = tuple(coords)
        k = len(coords)
        s, sk = self.side, self.q ** k
        acc = [Fraction(0)] * (sk * sk)
        for idx, m in enumerate(self.mass):
            if m:
                yi, xi = divmod(idx, s)
                x = block_point(xi, self.q, self.n)
                y = block_point(yi, self.q, self.n)
                acc[block_index([x[c] for c in coords], self.q) + sk * block_index([y[c] for c in coords], self.q)] += m
        scale = Fraction(sk * sk, len(self.mass))
        return PairDensity(self.q, k, tuple(a * scale for a in acc))

    def max_probability(self) -> tuple[Fraction, tuple]:
        best = max(self.mass)
        idx = self.mass.index(best)
        yi, xi = divmod(idx, self.side)
        return best / len(self.mass), (block_point(xi, self.q, self.n), block_point(yi, self.q, self.n))

    def condition(self, x_fix=None, y_fix=None) -> "PairDensity":
        """Condition on x_coords = x_values and/or y_coords = y_values."""
        s = self.side
        w = []
        for idx, m in enumerate(self.mass):
            yi, xi = divmod(idx, s)
            keep = True
            if x_fix is not None:
                x = block_point(xi, self.q, self.n)
                keep = all(x[c] == v for c, v in zip(*x_fix))
            if keep and y_fix is not None:
                y = block_point(yi, self.q, self.n)
                keep = all(y[c] == v for c, v in zip(*y_fix))
            w.append(m if keep else 0)
        if not any(w):
            raise DomainError("conditioning event has zero mass")
        return PairDensity.from_weights(self.q, self.n, w)


def marginal_condition(mu, coords: Sequence[int], fix=None):
    """Project onto `coords` after optionally conditioning on `fix`.

    For a Density, `fix` is (coords, values).  For a PairDensity it is
    ((x_coords, x_values), (y_coords, y_values)) with either side None.
    """
    if isinstance(mu, Density):
        if fix is not None:
            mu = mu.condition(*fix)
        return mu.marginal(coords)
    if isinstance(mu, PairDensity):
        if fix is not None:
            mu = mu.condition(*fix)
        return mu.project(coords)
    raise InputError("expected a Density or PairDensity")
