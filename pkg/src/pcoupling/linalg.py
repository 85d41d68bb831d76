"""Exact sparse linear algebra over the rationals.

Everything reduces to an incremental fraction-free row elimination: rows are
integer dicts keyed by arbitrary orderable labels, combined by cross-scaling
and renormalized by their content, so no rational arithmetic appears inside
the elimination (Bareiss-family).  Kernels come from the extended-matrix
trick: each column is augmented with an identity tag; columns that reduce to
zero yield integer kernel combinations.
"""

from fractions import Fraction
from math import gcd


def _clear_with_factor(vec):
    den = 1
    for v in vec.values():
        if isinstance(v, Fraction):
            den = den * v.denominator // gcd(den, v.denominator)
    out = {}
    for k, v in vec.items():
        n = int(v * den) if isinstance(v, Fraction) else v * den
        if n:
            out[k] = n
    return out, den


def _clear_denominators(vec):
    return _clear_with_factor(vec)[0]


def _normalize_content(vec):
    g = 0
    for v in vec.values():
        g = gcd(g, v)
        if g == 1:
            return vec
    if g > 1:
        return {k: v // g for k, v in vec.items()}
    return vec


class IncrementalSpan:
    """Growing row space over Q; add() reports whether the rank increased."""

    def __init__(self):
        self.pivots = {}       # pivot key -> integer row dict
        self._order = []       # pivot keys in insertion order

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, vec):
        """Fraction-free reduction of an integer row against stored pivots."""
        vec = dict(vec)
        while vec:
            k = max(vec)
            piv = self.pivots.get(k)
            if piv is None:
                return vec
            a, p = vec[k], piv[k]
            g = gcd(a, p)
            ca, cp = p // g, a // g
            out = {}
            for kk, v in vec.items():
                out[kk] = v * ca
            for kk, v in piv.items():
                s = out.get(kk, 0) - v * cp
                if s:
                    out[kk] = s
                else:
                    out.pop(kk, None)
            vec = _normalize_content(out)
        return vec

    def add(self, vec):
        vec = _clear_denominators(vec)
        red = self.reduce(vec)
        if not red:
            return False
        self.pivots[max(red)] = red
        self._order.append(max(red))
        return True

    def contains(self, vec):
        return not self.reduce(_clear_denominators(vec))


class KernelSolver:
    """Column-wise kernel accumulator via the extended-matrix trick.

    Columns live over 'A'-keys; each added column carries an identity tag.
    Pivoting is restricted to A-keys, so a column reducing to zero A-part
    certifies an exact linear relation among the added columns.
    """

    def __init__(self):
        self.span = IncrementalSpan()
        self.kernel = []     # integer dicts: column index -> coefficient
        self.ncols = 0
        self._factors = []   # denominator clearing factor per column

    def add_column(self, col):
        j = self.ncols
        self.ncols += 1
        scaled, factor = _clear_with_factor(col)
        self._factors.append(factor)
        vec = {(1, k): v for k, v in scaled.items()}
        vec[(0, j)] = 1
        red = self._reduce_a(vec)
        if any(k[0] == 1 for k in red):
            self.span.pivots[self._a_max(red)] = red
            return None
        # relation among the scaled columns; rescale to the originals
        rel = _normalize_content(
            {k[1]: v * self._factors[k[1]] for k, v in red.items()})
        self.kernel.append(rel)
        return rel

    @staticmethod
    def _a_max(vec):
        return max(k for k in vec if k[0] == 1)

    def _reduce_a(self, vec):
        while True:
            akeys = [k for k in vec if k[0] == 1]
            if not akeys:
                return vec
            k = max(akeys)
            piv = self.span.pivots.get(k)
            if piv is None:
                return vec
            a, p = vec[k], piv[k]
            g = gcd(a, p)
            ca, cp = p // g, a // g
            out = {kk: v * ca for kk, v in vec.items()}
            for kk, v in piv.items():
                s = out.get(kk, 0) - v * cp
                if s:
                    out[kk] = s
                else:
                    out.pop(kk, None)
            vec = _normalize_content(out)

    @property
    def rank(self):
        return self.ncols - len(self.kernel)


class ExactMatrix:
    """Sparse exact matrix: columns over arbitrary orderable row keys.

    rank and kernel are computed by the fraction-free elimination above and
    cached; rank + len(kernel_basis) = number of columns by construction.
    """

    def __init__(self, columns=None):
        self.columns = [dict(c) for c in (columns or [])]
        self._solver = None

    def add_column(self, col):
        if self._solver is not None:
            raise RuntimeError("matrix already eliminated")
        self.columns.append(dict(col))

    @property
    def ncols(self):
        return len(self.columns)

    def _eliminate(self):
        if self._solver is None:
            self._solver = KernelSolver()
            for c in self.columns:
                self._solver.add_column(c)
        return self._solver

    def rank(self):
        return self._eliminate().rank

    def kernel_basis(self):
        """Integer vectors (dicts col->int) spanning the null space."""
        return list(self._eliminate().kernel)

    def apply(self, vec):
        """Matrix-vector product for a coefficient dict col->scalar."""
        out = {}
        for j, c in vec.items():
            if not c:
                continue
            for k, v in self.columns[j].items():
                s = out.get(k, 0) + c * v
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return out


def solve_columns(columns, rhs):
    """A particular rational solution x of sum_j x_j columns[j] = rhs, or None."""
    ks = KernelSolver()
    for c in columns:
        ks.add_column(c)
    rel = ks.add_column(rhs)
    if rel is None or not rel.get(len(columns)):
        # also possible: rhs itself is zero
        if not _clear_denominators(rhs):
            return {j: Fraction(0) for j in range(len(columns))}
        return None
    lam = rel[len(columns)]
    return {j: Fraction(-rel.get(j, 0), lam) for j in range(len(columns))}


def intersect_image_rows(columns, keep):
    """Basis (as column-coefficient dicts) of im(columns) ∩ {rows in keep}.

    keep is a predicate on row keys.  Returns coefficient vectors x with
    A x supported inside keep."""
    ks = KernelSolver()
    for c in columns:
        ks.add_column({k: v for k, v in c.items() if not keep(k)})
    return ks.kernel
