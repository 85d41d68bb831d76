"""Fibered charts, Ehresmann connections, curvature and the bigraded calculus.

A connection is stored by its coefficients gamma[i][a]: the horizontal lift of
the i-th base coordinate field is hor_i = d/du^i + sum_a gamma_i^a d/dy^a.
Vertical-valued base forms (elements of the (p,q) bigraded module) map sorted
base-slot tuples to vertical multivectors.
"""

from fractions import Fraction

from pcoupling.calculus import (MultiVector, DiffForm, PoissonTensor,
                                PreconditionError, schouten, _merge_keys)
from pcoupling.ring import ChartMismatchError, RingError, ScalarExpr
from pcoupling.ring import BASE, CONSTANT, FIBER, Chart, VarSpec


class NotProjectableError(RingError):
    pass


class BundleChart:
    """Base/fiber split view of a chart; the split must cover all directions."""

    def __init__(self, chart):
        self.chart = chart
        self.base_dirs = chart.base_dirs
        self.fiber_dirs = chart.fiber_dirs
        self.m = len(self.base_dirs)
        self.n = len(self.fiber_dirs)
        self.base_slot = {d: i for i, d in enumerate(self.base_dirs)}
        self.fiber_slot = {d: a for a, d in enumerate(self.fiber_dirs)}

    def base_name(self, i):
        return self.chart.dir_name(self.base_dirs[i])

    def fiber_name(self, a):
        return self.chart.dir_name(self.fiber_dirs[a])

    def is_vertical(self, mv):
        return all(all(d in self.fiber_slot for d in k) for k in mv.comps)

    def __eq__(self, other):
        return isinstance(other, BundleChart) and self.chart == other.chart

    __hash__ = None


class Connection:
    """Ehresmann connection in coordinates: gamma coefficients per (i, a)."""

    def __init__(self, bchart, coeffs=None):
        self.bchart = bchart
        self.coeffs = {}
        for (i, a), c in (coeffs or {}).items():
            if not (0 <= i < bchart.m and 0 <= a < bchart.n):
                raise ValueError("connection index out of range")
            if not c.is_zero():
                self.coeffs[(i, a)] = c
        self._hor = {}

    @classmethod
    def trivial(cls, bchart):
        return cls(bchart, {})

    def hor(self, i):
        """Horizontal lift of the i-th base coordinate field."""
        got = self._hor.get(i)
        if got is None:
            ch = self.bchart.chart
            comps = {(self.bchart.base_dirs[i],): ch.one()}
            for a in range(self.bchart.n):
                c = self.coeffs.get((i, a))
                if c is not None:
                    comps[(self.bchart.fiber_dirs[a],)] = c
            got = self._hor[i] = MultiVector(ch, 1, comps)
        return got

    def is_trivial(self):
        return not self.coeffs

    def __eq__(self, other):
        return (isinstance(other, Connection)
                and self.bchart == other.bchart
                and self.coeffs == other.coeffs)

    __hash__ = None


class VValuedForm:
    """Element of the (p, q) module: base p-forms valued in vertical q-vectors."""

    __slots__ = ("bchart", "p", "q", "comps")

    def __init__(self, bchart, p, q, comps, clean=True):
        self.bchart = bchart
        self.p = p
        self.q = q
        if clean:
            comps = {k: v for k, v in comps.items() if not v.is_zero()}
            for k, v in comps.items():
                if v.degree != q:
                    raise ValueError("value degree mismatch")
                if not bchart.is_vertical(v):
                    raise ValueError(f"value at {k} is not vertical")
        self.comps = comps

    @classmethod
    def zero(cls, bchart, p, q):
        return cls(bchart, p, q, {})

    @classmethod
    def from_function(cls, bchart, f):
        return cls(bchart, 0, 0, {(): MultiVector.from_scalar(f)})

    @classmethod
    def from_vertical(cls, bchart, mv):
        if not bchart.is_vertical(mv):
            raise ValueError("not a vertical multivector")
        return cls(bchart, 0, mv.degree, {(): mv})

    def value(self, key):
        got = self.comps.get(tuple(key))
        if got is None:
            return MultiVector.zero(self.bchart.chart, self.q)
        return got

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if not isinstance(other, VValuedForm) or self.bchart != other.bchart:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return (self.p, self.q) == (other.p, other.q) and \
            self.comps == other.comps

    __hash__ = None

    def __add__(self, other):
        if (self.p, self.q) != (other.p, other.q):
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError("bidegree mismatch")
        out = dict(self.comps)
        for k, v in other.comps.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return VValuedForm(self.bchart, self.p, self.q, out, clean=False)

    def __neg__(self):
        return VValuedForm(self.bchart, self.p, self.q,
                           {k: -v for k, v in self.comps.items()}, clean=False)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, f):
        return VValuedForm(self.bchart, self.p, self.q,
                           {k: f * v for k, v in self.comps.items()})

    def map_values(self, fn):
        return VValuedForm(self.bchart, self.p, self.q,
                           {k: fn(v) for k, v in self.comps.items()})

    def __str__(self):
        if not self.comps:
            return "0"
        bc = self.bchart
        parts = []
        for k in sorted(self.comps):
            mon = "^".join("d" + bc.base_name(i) for i in k)
            v = str(self.comps[k])
            parts.append(f"[{v}]*{mon}" if mon else f"[{v}]")
        return " + ".join(parts)

    __repr__ = __str__


def bigrade(A, conn):
    """Split a multivector by horizontal/vertical bidegree for a connection.

    Returns {(p, q): VValuedForm}; resumming through from_bigraded
    reconstructs A exactly."""
    bc = conn.bchart
    ch = A.chart
    out = {}

    def put(p, q, hkey, vkey, coeff):
        if coeff.is_zero():
            return
        part = out.setdefault((p, q), {})
        sub = part.setdefault(hkey, {})
        sub[vkey] = sub.get(vkey, ch.zero()) + coeff

    # expand each coordinate factor: base dir d = hor_i - sum_a gamma_i^a d_a
    for key, c in A.comps.items():
        choices = []
        for d in key:
            i = bc.base_slot.get(d)
            if i is None:
                choices.append(((None, bc.fiber_slot[d], ch.one()),))
            else:
                opts = [(i, None, ch.one())]
                for a in range(bc.n):
                    g = conn.coeffs.get((i, a))
                    if g is not None:
                        opts.append((None, a, -g))
                choices.append(tuple(opts))
        _expand(choices, 0, [], c, put, ch)

    result = {}
    for (p, q), table in out.items():
        comps = {}
        for hkey, sub in table.items():
            mv = MultiVector(ch, q, {
                tuple(bc.fiber_dirs[a] for a in vkey): v
                for vkey, v in sub.items()})
            if not mv.is_zero():
                comps[hkey] = mv
        vv = VValuedForm(bc, p, q, comps)
        if not vv.is_zero():
            result[(p, q)] = vv
    return result


def _expand(choices, idx, picked, coeff, put, ch):
    if coeff.is_zero():
        return
    if idx == len(choices):
        hs = []
        vs = []
        # factors appear in original order; sort h's first then v's with sign
        seq = []
        for h, v, _ in picked:
            if h is not None:
                seq.append((0, h))
            else:
                seq.append((1, v))
        sign = 1
        arr = list(seq)
        for i in range(1, len(arr)):
            j = i
            while j > 0 and arr[j - 1] > arr[j]:
                arr[j - 1], arr[j] = arr[j], arr[j - 1]
                sign = -sign
                j -= 1
        for i in range(1, len(arr)):
            if arr[i - 1] == arr[i]:
                return
        hkey = tuple(x for t, x in arr if t == 0)
        vkey = tuple(x for t, x in arr if t == 1)
        put(len(hkey), len(vkey), hkey, vkey,
            coeff if sign > 0 else -coeff)
        return
    for opt in choices[idx]:
        _expand(choices, idx + 1, picked + [opt], coeff * opt[2], put, ch)


def from_bigraded(parts, conn):
    """Reassemble a multivector from its bigraded components."""
    bc = conn.bchart
    ch = bc.chart
    total = None
    for (p, q), vv in parts.items():
        for hkey, val in vv.comps.items():
            mv = val
            for i in reversed(hkey):
                mv = conn.hor(i).wedge(mv)
            total = mv if total is None else total + mv
    if total is None:
        return MultiVector.zero(ch, 0)
    return total


def curvature(conn):
    """Curv(d_i, d_j) = [hor_i, hor_j] as a (2,1) vertical-valued form."""
    bc = conn.bchart
    comps = {}
    for i in range(bc.m):
        for j in range(i + 1, bc.m):
            v = schouten(conn.hor(i), conn.hor(j))
            if not v.is_zero():
                if not bc.is_vertical(v):
                    raise AssertionError("curvature has horizontal components")
                comps[(i, j)] = v
    return VValuedForm(bc, 2, 1, comps)


def cov_ext_d(conn, eta):
    """Covariant exterior derivative (p,q) -> (p+1,q) on coordinate fields."""
    bc = conn.bchart
    ch = bc.chart
    acc = {}
    m = bc.m
    for key, val in eta.comps.items():
        for i in range(m):
            if i in key:
                continue
            merged = _merge_keys((i,), key)
            if merged is None:
                continue
            # merge sign equals (-1)^position of i in the merged key
            nkey, sign = merged
            lie = schouten(conn.hor(i), val)
            if lie.is_zero():
                continue
            if not bc.is_vertical(lie):
                raise AssertionError("covariant derivative left the module")
            term = lie if sign > 0 else -lie
            got = acc.get(nkey)
            acc[nkey] = term if got is None else got + term
    comps = {k: v for k, v in acc.items() if not v.is_zero()}
    return VValuedForm(bc, eta.p + 1, eta.q, comps)


def cov_d_squared_via_curvature(conn, eta):
    """Right-hand side of the curvature identity for (d^gamma)^2:
    -(sum over i<j) (-1)^(i+j) L_Curv(ui,uj) eta(...)."""
    bc = conn.bchart
    curv = curvature(conn)
    p = eta.p
    acc = {}
    for key in _tuples(bc.m, p + 2):
        total = None
        for ii in range(p + 2):
            for jj in range(ii + 1, p + 2):
                cv = curv.comps.get((key[ii], key[jj]))
                if cv is None:
                    continue
                rest = tuple(key[t] for t in range(p + 2)
                             if t != ii and t != jj)
                ev = eta.comps.get(rest)
                if ev is None:
                    continue
                term = schouten(cv, ev)
                if term.is_zero():
                    continue
                if (ii + jj) & 1:
                    term = -term
                total = term if total is None else total + term
        if total is not None and not total.is_zero():
            acc[key] = -total
    return VValuedForm(bc, p + 2, eta.q, acc)


def _tuples(m, k):
    from itertools import combinations
    return combinations(range(m), k)


def pullback_check(eta):
    """The horizontal form pi^* eta for a (p,0) element."""
    if eta.q != 0:
        raise ValueError("pullback_check needs a (p,0) element")
    bc = eta.bchart
    ch = bc.chart
    comps = {}
    for key, val in eta.comps.items():
        comps[tuple(bc.base_dirs[i] for i in key)] = val.as_scalar()
    return DiffForm(ch, eta.p, comps)


def eval_form_on_hor(form, conn, slots):
    """Evaluate a differential form on horizontal lifts of base slots."""
    from pcoupling.calculus import eval_form
    fields = [conn.hor(i) for i in slots]
    return eval_form(form, fields)


def prop_identity_residual(conn, eta):
    """pi^*(d^gamma eta) - (d pi^* eta)_{p+1,0}, evaluated on hor frames."""
    from pcoupling.calculus import exterior_d
    bc = conn.bchart
    lhs = pullback_check(cov_ext_d(conn, eta))
    dpe = exterior_d(pullback_check(eta))
    comps = {}
    for key in _tuples(bc.m, eta.p + 1):
        val = eval_form_on_hor(dpe, conn, key)
        lv = lhs.comps.get(tuple(bc.base_dirs[i] for i in key),
                           bc.chart.zero())
        diff = lv - val
        if not diff.is_zero():
            comps[key] = MultiVector.from_scalar(diff)
    return VValuedForm(bc, eta.p + 1, 0, comps)


def foliated_d(conn, beta):
    """Foliated exterior differential along a flat connection's foliation.

    beta must annihilate the vertical bundle (pure base-differential form);
    the result is again such a form."""
    from pcoupling.calculus import exterior_d
    bc = conn.bchart
    if not curvature(conn).is_zero():
        raise PreconditionError("foliated differential needs a flat connection")
    for key in beta.comps:
        if any(d not in bc.base_slot for d in key):
            raise ValueError("form does not annihilate the vertical bundle")
    db = exterior_d(beta)
    comps = {}
    for key in _tuples(bc.m, beta.degree + 1):
        val = eval_form_on_hor(db, conn, key)
        if not val.is_zero():
            comps[tuple(bc.base_dirs[i] for i in key)] = val
    return DiffForm(bc.chart, beta.degree + 1, comps)


def project_poisson(P, bchart):
    """Push a base-independent vertical Poisson tensor to the fiber factor.

    Returns (fiber_chart, PoissonTensor on it).  Coefficients must not
    depend on base variables and must not involve base generators."""
    ch = bchart.chart
    if isinstance(P, PoissonTensor):
        P = P.bivector
    if not bchart.is_vertical(P):
        raise NotProjectableError("tensor has horizontal components")
    base_gens = []
    for d in bchart.base_dirs:
        vi = ch.directions[d]
        base_gens.extend(ch.var_gens[vi])
    for key, c in P.comps.items():
        for src in (c.num, c.den):
            for e in src:
                if any(e[g] for g in base_gens):
                    raise NotProjectableError(
                        f"component {key} depends on base variables")
    # build the fiber chart (fiber variables + constants, same order)
    keep = [s for s in ch.specs if s.role == FIBER or s.kind == CONSTANT]
    fchart = Chart([VarSpec(s.name, s.kind, s.role) for s in keep])
    gen_map = {}
    for s in keep:
        for g_old, g_new in zip(ch.var_gens[ch.var_index[s.name]],
                                fchart.var_gens[fchart.var_index[s.name]]):
            gen_map[g_old] = g_new

    def remap_terms(src):
        out = {}
        for e, cf in src.items():
            e2 = [0] * fchart.ngens
            for g_old, g_new in gen_map.items():
                e2[g_new] = e[g_old]
            out[tuple(e2)] = cf
        return out

    comps = {}
    for key, c in P.comps.items():
        nkey = []
        for d in key:
            name = ch.dir_name(d)
            nkey.append(fchart.dir_index[fchart.var_index[name]])
        comps[tuple(nkey)] = ScalarExpr(fchart, remap_terms(c.num),
                                        remap_terms(c.den))
    out = PoissonTensor.verify(MultiVector(fchart, 2, comps))
    return fchart, out
