"""Exact coefficient ring over a coordinate chart.

Scalars are rational functions of the chart variables with integer-cleared
numerator and denominator.  A periodic variable theta contributes two
generators cos(theta), sin(theta) subject to cos^2 + sin^2 = 1; canonical form
keeps every sin exponent at most 1 and keeps denominators sin-free (reachable
for every nonzero element by conjugation).  Equality to zero is decided by
canonical-form emptiness, which is what every symbolic zero-test downstream
reduces to.
"""

from fractions import Fraction
from math import gcd

from pcoupling import _kernels as K

AFFINE = "affine"
PERIODIC = "periodic"
CONSTANT = "constant"
BASE = "base"
FIBER = "fiber"


class RingError(Exception):
    pass


class ChartMismatchError(RingError):
    pass


class DivisionByZero(RingError):
    pass


class VarSpec:
    """A chart variable: name, kind (affine/periodic/constant), role (base/fiber)."""

    __slots__ = ("name", "kind", "role")

    def __init__(self, name, kind=AFFINE, role=FIBER):
        if kind not in (AFFINE, PERIODIC, CONSTANT):
            raise ValueError(f"unknown kind {kind!r}")
        if role not in (BASE, FIBER):
            raise ValueError(f"unknown role {role!r}")
        self.name = name
        self.kind = kind
        self.role = role

    def __repr__(self):
        return f"VarSpec({self.name!r}, {self.kind!r}, {self.role!r})"


class Chart:
    """An ordered list of variables plus the derived generator table.

    Generators (the monomial slots) are: one per affine/constant variable, a
    (cos, sin) pair per periodic variable.  Directions are the differentiable
    variables (everything except constants), in variable order.
    """

    def __init__(self, specs):
        names = [s.name for s in specs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable names")
        self.specs = tuple(specs)
        self.var_index = {s.name: i for i, s in enumerate(specs)}
        gens = []
        self.var_gens = []  # per variable: tuple of generator indices
        sin_pairs = []
        for s in specs:
            if s.kind == PERIODIC:
                ci = len(gens)
                gens.append(f"cos({s.name})")
                gens.append(f"sin({s.name})")
                self.var_gens.append((ci, ci + 1))
                sin_pairs.append((ci + 1, ci))
            else:
                gens.append(s.name)
                self.var_gens.append((len(gens) - 1,))
        self.gens = tuple(gens)
        self.ngens = len(gens)
        self.sin_pairs = tuple(sin_pairs)
        self.directions = tuple(i for i, s in enumerate(specs)
                                if s.kind != CONSTANT)
        self.dir_index = {v: d for d, v in enumerate(self.directions)}
        self.base_dirs = tuple(d for d, v in enumerate(self.directions)
                               if specs[v].role == BASE)
        self.fiber_dirs = tuple(d for d, v in enumerate(self.directions)
                                if specs[v].role == FIBER)
        # generator -> degree-counting group, used by the cohomology slices
        self.gen_group = []
        for i, s in enumerate(specs):
            for _ in self.var_gens[i]:
                if s.kind == CONSTANT:
                    self.gen_group.append("const")
                elif s.kind == PERIODIC:
                    self.gen_group.append("trig:" + s.role)
                else:
                    self.gen_group.append(s.role)
        self.gen_group = tuple(self.gen_group)

    @classmethod
    def make(cls, base=(), fiber=(), periodic=(), constants=()):
        periodic = set(periodic)
        specs = [VarSpec(n, PERIODIC if n in periodic else AFFINE, BASE)
                 for n in base]
        specs += [VarSpec(n, PERIODIC if n in periodic else AFFINE, FIBER)
                  for n in fiber]
        specs += [VarSpec(n, CONSTANT, FIBER) for n in constants]
        return cls(specs)

    def __eq__(self, other):
        return self is other or (isinstance(other, Chart)
                                 and self.gens == other.gens
                                 and [(s.name, s.kind, s.role) for s in self.specs]
                                 == [(s.name, s.kind, s.role) for s in other.specs])

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"Chart({', '.join(s.name for s in self.specs)})"

    def dir_name(self, d):
        return self.specs[self.directions[d]].name

    # -- scalar constructors ------------------------------------------------

    def zero(self):
        return ScalarExpr(self, {}, {(0,) * self.ngens: 1})

    def one(self):
        return self.const(1)

    def const(self, q):
        q = Fraction(q)
        e0 = (0,) * self.ngens
        num = {} if q == 0 else {e0: q.numerator}
        return ScalarExpr(self, num, {e0: q.denominator})

    def var(self, name):
        i = self.var_index.get(name)
        if i is None:
            raise ChartMismatchError(f"variable {name!r} not in chart")
        s = self.specs[i]
        if s.kind == PERIODIC:
            raise RingError(
                f"{name!r} is periodic; use cos_(name)/sin_(name)")
        return self._gen(self.var_gens[i][0])

    def cos_(self, name):
        return self._trig(name, 0)

    def sin_(self, name):
        return self._trig(name, 1)

    def _trig(self, name, which):
        i = self.var_index.get(name)
        if i is None:
            raise ChartMismatchError(f"variable {name!r} not in chart")
        if self.specs[i].kind != PERIODIC:
            raise RingError(f"{name!r} is not periodic")
        return self._gen(self.var_gens[i][which])

    def _gen(self, g):
        e = [0] * self.ngens
        e[g] = 1
        return ScalarExpr(self, {tuple(e): 1}, {(0,) * self.ngens: 1})

    def scalar(self, src):
        """Build a scalar from a string (expression grammar) or a number."""
        if isinstance(src, ScalarExpr):
            if src.chart is not self:
                raise ChartMismatchError("scalar from another chart")
            return src
        if isinstance(src, (int, Fraction)):
            return self.const(src)
        from pcoupling.parser import parse_scalar
        return parse_scalar(self, src)


def _fmt_terms(chart, terms):
    if not terms:
        return "0"
    parts = []
    for e in sorted(terms, reverse=True):
        c = terms[e]
        mon = "*".join(
            (g if k == 1 else f"{g}^{k}")
            for g, k in zip(chart.gens, e) if k
        )
        if mon:
            if c == 1:
                s = mon
            elif c == -1:
                s = "-" + mon
            else:
                s = f"{c}*{mon}"
        else:
            s = str(c)
        parts.append(s)
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out


class ScalarExpr:
    """A rational function in canonical form: integer-coefficient numerator
    and denominator term dicts, denominator sin-free with positive leading
    coefficient, no common factor (including integer content)."""

    __slots__ = ("chart", "num", "den")

    def __init__(self, chart, num, den, _canonical=False):
        self.chart = chart
        if _canonical:
            self.num, self.den = num, den
            return
        self.num, self.den = _normalize(chart, num, den)

    # -- predicates ---------------------------------------------------------

    def is_zero(self):
        return not self.num

    def is_one(self):
        e0 = (0,) * self.chart.ngens
        return self.num == {e0: 1} and self.den == {e0: 1}

    def is_rational_const(self):
        e0 = (0,) * self.chart.ngens
        return (not self.num or set(self.num) == {e0}) and set(self.den) == {e0}

    def as_fraction(self):
        if not self.is_rational_const():
            raise RingError("not a rational constant")
        e0 = (0,) * self.chart.ngens
        return Fraction(self.num.get(e0, 0), self.den[e0])

    def den_is_const(self):
        e0 = (0,) * self.chart.ngens
        return set(self.den) == {e0}

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.chart.const(other)
        if not isinstance(other, ScalarExpr):
            return NotImplemented
        return (self.chart == other.chart and self.num == other.num
                and self.den == other.den)

    __hash__ = None

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, ScalarExpr):
            if other.chart is not self.chart and other.chart != self.chart:
                raise ChartMismatchError("operands on different charts")
            return other
        if isinstance(other, (int, Fraction)):
            return self.chart.const(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        sp = self.chart.sin_pairs
        if self.den == o.den:
            return ScalarExpr(self.chart, K.t_add(self.num, o.num), self.den)
        num = K.t_add(K.t_mul(self.num, o.den, sp), K.t_mul(o.num, self.den, sp))
        return ScalarExpr(self.chart, num, K.t_mul(self.den, o.den, sp))

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr(self.chart, K.t_neg(self.num), self.den,
                          _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return -(self - other)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _mul_reduced(self.chart, self.num, o.num, self.den, o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise DivisionByZero("division by zero scalar")
        return ScalarExpr(self.chart,
                          K.t_mul(self.num, o.den, self.chart.sin_pairs),
                          K.t_mul(self.den, o.num, self.chart.sin_pairs))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        return o / self

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self.chart.one() / self) ** (-n)
        sp = self.chart.sin_pairs
        return ScalarExpr(self.chart, K.t_pow(self.num, n, sp),
                          K.t_pow(self.den, n, sp))

    @staticmethod
    def sum(chart, items):
        """Sum with one terminal normalization (hot-path helper).

        Summands are grouped by denominator, then folded pairwise through the
        lcm so intermediate denominators never exceed the true common one.
        """
        sp = chart.sin_pairs
        groups = {}
        for x in items:
            if x.is_zero():
                continue
            key = tuple(sorted(x.den.items()))
            got = groups.get(key)
            if got is None:
                groups[key] = [x.num, x.den]
            else:
                got[0] = K.t_add(got[0], x.num)
        num = {}
        den = {(0,) * chart.ngens: 1}
        for n2, d2 in groups.values():
            g = K.t_gcd(den, d2)
            eg, cg = K.t_lead(g)
            if any(eg) or cg != 1:
                da = K.t_divexact(den, g)
                db = K.t_divexact(d2, g)
            else:
                da, db = den, d2
            num = K.t_add(K.t_mul(num, db, sp), K.t_mul(n2, da, sp))
            den = K.t_mul(den, db, sp)
        return ScalarExpr(chart, num, den)

    # -- calculus -----------------------------------------------------------

    def derive(self, var):
        """Partial derivative with respect to a chart variable (name or index)."""
        ch = self.chart
        if isinstance(var, str):
            if var not in ch.var_index:
                raise ChartMismatchError(f"variable {var!r} not in chart")
            vi = ch.var_index[var]
        else:
            vi = var
        spec = ch.specs[vi]
        if spec.kind == CONSTANT:
            return ch.zero()
        sp = ch.sin_pairs
        if spec.kind == AFFINE:
            g = ch.var_gens[vi][0]
            dn = K.t_derive_affine(self.num, g)
            dd = K.t_derive_affine(self.den, g)
        else:
            ci, si = ch.var_gens[vi]
            dn = K.t_derive_periodic(self.num, ci, si, sp)
            dd = K.t_derive_periodic(self.den, ci, si, sp)
        if not dd:
            return ScalarExpr(ch, dn, self.den)
        num = K.t_sub(K.t_mul(dn, self.den, sp), K.t_mul(self.num, dd, sp))
        return ScalarExpr(ch, num, K.t_mul(self.den, self.den, sp))

    def derive_dir(self, d):
        return self.derive(self.chart.directions[d])

    def subst(self, assignment):
        """Substitute rational values for affine/constant variables."""
        ch = self.chart
        num, den = self.num, self.den
        extra_num = 1
        extra_den = 1
        for name, val in assignment.items():
            vi = ch.var_index.get(name)
            if vi is None:
                raise ChartMismatchError(f"variable {name!r} not in chart")
            if ch.specs[vi].kind == PERIODIC:
                raise RingError("cannot substitute a periodic variable")
            q = Fraction(val)
            g = ch.var_gens[vi][0]
            num, sn = K.t_subst_rat(num, g, q.numerator, q.denominator)
            den, sd = K.t_subst_rat(den, g, q.numerator, q.denominator)
            extra_num *= sd
            extra_den *= sn
        if not den:
            raise DivisionByZero("denominator vanishes under substitution")
        num = K.t_scale(num, extra_num)
        den = K.t_scale(den, extra_den)
        return ScalarExpr(ch, num, den)

    def total_degree(self):
        return max((sum(e) for e in self.num), default=0)

    def __str__(self):
        n = _fmt_terms(self.chart, self.num)
        if self.den == {(0,) * self.chart.ngens: 1}:
            return n
        d = _fmt_terms(self.chart, self.den)
        if not n.lstrip("-").isdigit():
            n = f"({n})"
        if not d.isdigit():
            d = f"({d})"
        return f"{n}/{d}"

    __repr__ = __str__


_UNIT_LEAD = ((), 1)


def _is_unit(g):
    e, c = K.t_lead(g)
    return c == 1 and not any(e)


def _mul_reduced(chart, n1, n2, d1, d2):
    """Product of two canonical fractions with cross-cancellation.

    Inputs reduced pairwise, so after cancelling gcd(n1,d2) and gcd(n2,d1)
    the free-ring product is already reduced; on trig-free charts this skips
    the terminal gcd entirely."""
    sp = chart.sin_pairs
    if not n1 or not n2:
        return chart.zero()
    g1 = K.t_gcd(n1, d2)
    if not _is_unit(g1):
        n1 = K.t_divexact(n1, g1)
        d2 = K.t_divexact(d2, g1)
    g2 = K.t_gcd(n2, d1)
    if not _is_unit(g2):
        n2 = K.t_divexact(n2, g2)
        d1 = K.t_divexact(d1, g2)
    num = K.t_mul(n1, n2, sp)
    den = K.t_mul(d1, d2, sp)
    if not sp:
        if den[max(den)] < 0:
            num, den = K.t_neg(num), K.t_neg(den)
        return ScalarExpr(chart, num, den, _canonical=True)
    return ScalarExpr(chart, num, den)


def _normalize(chart, num, den):
    if not den:
        raise DivisionByZero("zero denominator")
    e0 = (0,) * chart.ngens
    if not num:
        return {}, {e0: 1}
    sp = chart.sin_pairs
    num = K.t_reduce(num, sp)
    den = K.t_reduce(den, sp)
    # clear sin generators from the denominator by conjugation
    for si, ci in sp:
        if any(e[si] for e in den):
            u = {e: c for e, c in den.items() if e[si] == 0}
            v = {e[:si] + (0,) + e[si + 1:]: c for e, c in den.items()
                 if e[si] == 1}
            conj = K.t_sub(u, {e[:si] + (1,) + e[si + 1:]: c
                               for e, c in v.items()})
            den = K.t_mul(den, conj, sp)
            num = K.t_mul(num, conj, sp)
    if not num:
        return {}, {e0: 1}
    g = K.t_gcd(num, den)
    eg, cg = K.t_lead(g)
    if any(eg) or cg != 1:
        num = K.t_divexact(num, g)
        den = K.t_divexact(den, g)
    if den[max(den)] < 0:
        num = K.t_neg(num)
        den = K.t_neg(den)
    return num, den


def normalize(f):
    """Re-canonicalize a scalar (idempotent; exposed for testing the form)."""
    return ScalarExpr(f.chart, dict(f.num), dict(f.den))


def derive(f, var):
    return f.derive(var)


class Poly:
    """A polynomial element: integer term dict over the chart generators plus
    a positive integer denominator with gcd(content, den) = 1.  Mostly a view
    onto the numerator layer of ScalarExpr; coefficient() exposes the rational
    coefficients."""

    __slots__ = ("chart", "terms", "den")

    def __init__(self, chart, terms, den=1):
        terms = K.t_reduce({e: c for e, c in terms.items() if c},
                           chart.sin_pairs)
        if den < 0:
            den, terms = -den, K.t_neg(terms)
        if den == 0:
            raise DivisionByZero("zero denominator")
        g = gcd(K.t_content(terms), den)
        if g > 1:
            terms = K.t_divexact_const(terms, g)
            den //= g
        self.chart = chart
        self.terms = terms
        self.den = den

    @classmethod
    def from_scalar(cls, f):
        if not f.den_is_const():
            raise RingError("scalar is not polynomial")
        return cls(f.chart, f.num, f.den[(0,) * f.chart.ngens])

    def to_scalar(self):
        e0 = (0,) * self.chart.ngens
        return ScalarExpr(self.chart, self.terms, {e0: self.den})

    def coefficient(self, exps):
        return Fraction(self.terms.get(tuple(exps), 0), self.den)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, Poly) and self.chart == other.chart
                and self.terms == other.terms and self.den == other.den)

    __hash__ = None

    def __add__(self, other):
        return Poly(self.chart,
                    K.t_add(K.t_scale(self.terms, other.den),
                            K.t_scale(other.terms, self.den)),
                    self.den * other.den)

    def __mul__(self, other):
        return Poly(self.chart,
                    K.t_mul(self.terms, other.terms, self.chart.sin_pairs),
                    self.den * other.den)

    def __neg__(self):
        return Poly(self.chart, K.t_neg(self.terms), self.den)

    def __str__(self):
        s = _fmt_terms(self.chart, self.terms)
        return s if self.den == 1 else f"({s})/{self.den}"
