"""Finite-dimensional slices of tensor spaces with bounded coefficient degree.

A slice enumerates basis elements (monomial exponent tuple, direction tuple)
for multivectors of a fixed degree whose polynomial coefficients have total
degree at most max_deg (sin exponents capped at 1 by the ring's canonical
form).  Coordinates of polynomial tensors live in exactly these labels, which
double as the row keys of the sparse exact matrices.
"""

from fractions import Fraction
from itertools import combinations

from pcoupling.calculus import MultiVector
from pcoupling.ring import RingError, ScalarExpr


def monomials(chart, max_deg):
    """All canonical exponent tuples of total degree <= max_deg."""
    out = []
    sin_idx = {si for si, _ in chart.sin_pairs}

    def rec(g, remaining, current):
        if g == chart.ngens:
            out.append(tuple(current))
            return
        cap = remaining if g not in sin_idx else min(remaining, 1)
        for e in range(cap + 1):
            current.append(e)
            rec(g + 1, remaining - e, current)
            current.pop()

    rec(0, max_deg, [])
    return sorted(out)


def monomial_scalar(chart, exps):
    return ScalarExpr(chart, {tuple(exps): 1}, {(0,) * chart.ngens: 1})


class GradedSlice:
    """Basis of degree-k multivectors with coefficients of degree <= max_deg.

    dirs restricts the allowed directions (e.g. vertical slices)."""

    def __init__(self, chart, degree, max_deg, dirs=None):
        self.chart = chart
        self.degree = degree
        self.max_deg = max_deg
        self.dirs = tuple(dirs) if dirs is not None else \
            tuple(range(len(chart.directions)))
        mons = monomials(chart, max_deg)
        self.basis = [(e, key) for key in combinations(self.dirs, degree)
                      for e in mons]
        self.index = {lab: i for i, lab in enumerate(self.basis)}

    @property
    def dim(self):
        return len(self.basis)

    def basis_mv(self, i):
        e, key = self.basis[i]
        return MultiVector(self.chart, self.degree,
                           {key: monomial_scalar(self.chart, e)})

    def element(self, coeffs):
        """Multivector from a coefficient dict index -> rational."""
        comps = {}
        for i, c in coeffs.items():
            if not c:
                continue
            e, key = self.basis[i]
            term = Fraction(c) * monomial_scalar(self.chart, e)
            got = comps.get(key)
            comps[key] = term if got is None else got + term
        return MultiVector(self.chart, self.degree, comps)

    def coords_of(self, mv):
        """Coordinates (index dict) of a slice member; None if outside."""
        lab = mv_labels(mv)
        if lab is None:
            return None
        out = {}
        for k, v in lab.items():
            i = self.index.get(k)
            if i is None:
                return None
            out[i] = v
        return out


def mv_labels(mv):
    """Label coordinates {(exps, key): Fraction} of a polynomial multivector.

    Returns None when a coefficient is not polynomial."""
    out = {}
    for key, c in mv.comps.items():
        if not c.den_is_const():
            return None
        den = c.den[(0,) * mv.chart.ngens]
        for e, n in c.num.items():
            out[(e, key)] = Fraction(n, den)
    return out


def mv_labels_strict(mv):
    lab = mv_labels(mv)
    if lab is None:
        raise RingError("tensor has non-polynomial coefficients")
    return lab


def label_weight(label):
    e, _key = label
    return sum(e)


def label_group_weights(chart, label):
    e, _key = label
    out = {}
    for g, k in enumerate(e):
        if k:
            grp = chart.gen_group[g]
            out[grp] = out.get(grp, 0) + k
    return out


def operator_columns(op, slc):
    """Columns (label dicts) of a linear operator on a slice basis."""
    cols = []
    for i in range(slc.dim):
        img = op(slc.basis_mv(i))
        cols.append(mv_labels_strict(img) if img is not None else {})
    return cols
