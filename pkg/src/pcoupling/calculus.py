"""Multivector fields, differential forms, and the Schouten-Nijenhuis calculus.

Sign conventions, fixed once and verified by the property suite:

* [X, Y] is the Lie bracket of vector fields and [X, f] = X(f);
* graded antisymmetry [A, B] = -(-1)^((a-1)(b-1)) [B, A];
* graded Leibniz [A, B ^ C] = [A, B] ^ C + (-1)^((a-1) b) B ^ [A, C];
* consequently [Psi, F] = -Psi#(dF) for a bivector Psi and a function F.

Internally the bracket is the odd-coordinate formula
[A, B] = (-1)^(a+1) A.B - (-1)^((a-1)(b-1)+b+1) B.A with
A.B = sum_i (dA/dxi_i) ^ (dB/dx_i), which realizes exactly these anchors.
"""

from fractions import Fraction

from pcoupling.ring import ChartMismatchError, RingError, ScalarExpr


class PreconditionError(RingError):
    pass


def _merge_keys(k1, k2):
    """Merge two strictly increasing tuples; (key, sign) or None on repeat."""
    if not k1:
        return k2, 1
    if not k2:
        return k1, 1
    out = []
    i = j = 0
    sign = 1
    n1 = len(k1)
    while i < n1 and j < len(k2):
        a, b = k1[i], k2[j]
        if a == b:
            return None
        if a < b:
            out.append(a)
            i += 1
        else:
            out.append(b)
            j += 1
            if (n1 - i) & 1:
                sign = -sign
    out.extend(k1[i:])
    out.extend(k2[j:])
    return tuple(out), sign


class _Tensor:
    """Shared sparse storage: strictly increasing direction tuples -> scalars."""

    __slots__ = ("chart", "degree", "comps")

    def __init__(self, chart, degree, comps, clean=True):
        self.chart = chart
        self.degree = degree
        if clean:
            comps = {k: v for k, v in comps.items() if not v.is_zero()}
        self.comps = comps

    def is_zero(self):
        return not self.comps

    def __eq__(self, other):
        if type(self) is not type(other) or self.chart != other.chart:
            return NotImplemented
        if self.is_zero() and other.is_zero():
            return True
        return self.degree == other.degree and self.comps == other.comps

    __hash__ = None

    def _check(self, other):
        if self.chart != other.chart:
            raise ChartMismatchError("tensors on different charts")

    def __add__(self, other):
        self._check(other)
        if self.degree != other.degree:
            # zero tensors carry a formal degree; let them absorb
            if self.is_zero():
                return other
            if other.is_zero():
                return self
            raise ValueError("degree mismatch in sum")
        out = dict(self.comps)
        for k, v in other.comps.items():
            s = out.get(k)
            s = v if s is None else s + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return type(self)(self.chart, self.degree, out, clean=False)

    def __neg__(self):
        return type(self)(self.chart, self.degree,
                          {k: -v for k, v in self.comps.items()}, clean=False)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, f):
        if isinstance(f, (int, Fraction)):
            f = self.chart.const(f)
        if f.is_zero():
            return type(self)(self.chart, self.degree, {})
        return type(self)(self.chart, self.degree,
                          {k: f * v for k, v in self.comps.items()})

    def map_coeffs(self, fn):
        return type(self)(self.chart, self.degree,
                          {k: fn(v) for k, v in self.comps.items()})

    def wedge(self, other):
        self._check(other)
        out = {}
        for k1, c1 in self.comps.items():
            for k2, c2 in other.comps.items():
                m = _merge_keys(k1, k2)
                if m is None:
                    continue
                key, sign = m
                v = c1 * c2
                if sign < 0:
                    v = -v
                s = out.get(key)
                s = v if s is None else s + v
                out[key] = s
        return type(self)(self.chart, self.degree + other.degree, out)

    def _fmt(self, symbol):
        if not self.comps:
            return "0"
        parts = []
        for k in sorted(self.comps):
            mon = "^".join(symbol + self.chart.dir_name(d) for d in k)
            c = str(self.comps[k])
            parts.append(f"({c})*{mon}" if mon else c)
        return " + ".join(parts)


class MultiVector(_Tensor):
    """Antisymmetric contravariant tensor; degree 0 wraps a single scalar."""

    def __str__(self):
        return self._fmt("@")

    __repr__ = __str__

    @classmethod
    def zero(cls, chart, degree=0):
        return cls(chart, degree, {})

    @classmethod
    def from_scalar(cls, f):
        return cls(f.chart, 0, {(): f})

    def as_scalar(self):
        if self.degree != 0:
            raise ValueError("not a function")
        return self.comps.get((), self.chart.zero())


class DiffForm(_Tensor):
    """Antisymmetric covariant tensor with the same sparse storage."""

    def __str__(self):
        return self._fmt("d")

    __repr__ = __str__

    @classmethod
    def zero(cls, chart, degree=0):
        return cls(chart, degree, {})


def coord_field(chart, var):
    """The coordinate vector field for a chart variable name."""
    vi = chart.var_index[var]
    d = chart.dir_index[vi]
    return MultiVector(chart, 1, {(d,): chart.one()})


def coord_form(chart, var):
    vi = chart.var_index[var]
    d = chart.dir_index[vi]
    return DiffForm(chart, 1, {(d,): chart.one()})


def differential(f):
    """Exterior derivative of a scalar as a 1-form."""
    ch = f.chart
    comps = {}
    for d in range(len(ch.directions)):
        df = f.derive_dir(d)
        if not df.is_zero():
            comps[(d,)] = df
    return DiffForm(ch, 1, comps)


def _odd_derivative(A, i):
    """Left derivative with respect to the odd generator of direction i."""
    out = {}
    for k, c in A.comps.items():
        if i in k:
            pos = k.index(i)
            key = k[:pos] + k[pos + 1:]
            out[key] = -c if (pos & 1) else c
    return out


def schouten(A, B):
    """Schouten-Nijenhuis bracket with the module's sign conventions."""
    A._check(B)
    ch = A.chart
    a, b = A.degree, B.degree
    deg = a + b - 1
    if deg < 0:
        return MultiVector.zero(ch, 0)
    ndirs = len(ch.directions)
    acc = {}

    def accumulate(P, Q, sgn):
        # sgn * sum_i (dP/dxi_i) ^ (dQ/dx_i)
        for i in range(ndirs):
            dP = _odd_derivative(P, i)
            if not dP:
                continue
            for kq, cq in Q.comps.items():
                dc = cq.derive_dir(i)
                if dc.is_zero():
                    continue
                for kp, cp in dP.items():
                    m = _merge_keys(kp, kq)
                    if m is None:
                        continue
                    key, s2 = m
                    v = cp * dc
                    if sgn * s2 < 0:
                        v = -v
                    acc.setdefault(key, []).append(v)

    s1 = -1 if (a + 1) & 1 else 1
    s2 = -1 if ((a - 1) * (b - 1) + b + 1) & 1 else 1
    accumulate(A, B, s1)
    accumulate(B, A, -s2)
    comps = {k: ScalarExpr.sum(ch, vs) for k, vs in acc.items()}
    return MultiVector(ch, deg, comps)


def jacobiator(psi):
    """[Psi, Psi] for a bivector; zero exactly when Psi is Poisson."""
    if psi.degree != 2:
        raise ValueError("jacobiator needs a bivector")
    return schouten(psi, psi)


def jacobiator_oracle(psi):
    """Independent coordinate Jacobiator: the cyclic sum
    sum_l (Psi^{li} d_l Psi^{jk} + Psi^{lj} d_l Psi^{ki} + Psi^{lk} d_l Psi^{ij})
    as a 3-vector; relates to the bracket by [Psi,Psi] = -2 * oracle."""
    ch = psi.chart
    ndirs = len(ch.directions)

    def comp(j, k):
        if j == k:
            return ch.zero()
        if j < k:
            return psi.comps.get((j, k), ch.zero())
        v = psi.comps.get((k, j))
        return ch.zero() if v is None else -v

    out = {}
    for i in range(ndirs):
        for j in range(i + 1, ndirs):
            for k in range(j + 1, ndirs):
                terms = []
                for l in range(ndirs):
                    for (p, q, r) in ((i, j, k), (j, k, i), (k, i, j)):
                        c1 = comp(l, p)
                        if c1.is_zero():
                            continue
                        d = comp(q, r).derive_dir(l)
                        if not d.is_zero():
                            terms.append(c1 * d)
                if terms:
                    v = ScalarExpr.sum(ch, terms)
                    if not v.is_zero():
                        out[(i, j, k)] = v
    return MultiVector(ch, 3, out)


class PoissonTensor:
    """A bivector plus a cached Jacobi verification flag."""

    __slots__ = ("bivector", "_verified")

    def __init__(self, bivector, verified=False):
        if bivector.degree != 2:
            raise ValueError("Poisson tensor must be a bivector")
        self.bivector = bivector
        self._verified = verified

    @classmethod
    def verify(cls, bivector):
        jac = jacobiator(bivector)
        if not jac.is_zero():
            raise PreconditionError(f"Jacobi identity fails: [P,P] = {jac}")
        return cls(bivector, verified=True)

    @property
    def chart(self):
        return self.bivector.chart

    @property
    def verified(self):
        return self._verified

    def require_verified(self):
        if not self._verified:
            raise PreconditionError("Poisson tensor is not Jacobi-verified")


def lichnerowicz_delta(psi, A):
    """delta(A) = [Psi, A]; requires a Jacobi-verified tensor."""
    psi.require_verified()
    return schouten(psi.bivector, A)


def eval_bivector(psi, alpha, beta):
    """Psi(alpha, beta) for 1-forms."""
    ch = psi.chart
    terms = []
    for (j, k), c in psi.comps.items():
        aj = alpha.comps.get((j,))
        bk = beta.comps.get((k,))
        if aj is not None and bk is not None:
            terms.append(c * aj * bk)
        ak = alpha.comps.get((k,))
        bj = beta.comps.get((j,))
        if ak is not None and bj is not None:
            terms.append(-(c * ak * bj))
    return ScalarExpr.sum(ch, terms)


def sharp(psi, alpha):
    """Psi#(alpha) with the pairing <beta, Psi#(alpha)> = Psi(alpha, beta)."""
    if isinstance(psi, PoissonTensor):
        psi = psi.bivector
    psi._check(alpha)
    if alpha.degree != 1:
        raise ValueError("sharp expects a 1-form")
    ch = psi.chart
    acc = {}
    for (j, k), c in psi.comps.items():
        aj = alpha.comps.get((j,))
        if aj is not None:
            acc.setdefault((k,), []).append(c * aj)
        ak = alpha.comps.get((k,))
        if ak is not None:
            acc.setdefault((j,), []).append(-(c * ak))
    comps = {k: ScalarExpr.sum(ch, vs) for k, vs in acc.items()}
    return MultiVector(ch, 1, comps)


def hamiltonian_vf(psi, F):
    """X_F = Psi#(dF)."""
    if isinstance(F, MultiVector):
        F = F.as_scalar()
    return sharp(psi, differential(F))


def is_casimir(psi, F):
    if isinstance(F, MultiVector):
        F = F.as_scalar()
    return hamiltonian_vf(psi, F).is_zero()


def is_poisson_vf(psi, Z):
    if isinstance(psi, PoissonTensor):
        psi.require_verified()
        psi = psi.bivector
    return schouten(Z, psi).is_zero()


def exterior_d(omega):
    """d on forms; d o d = 0."""
    ch = omega.chart
    acc = {}
    for k, c in omega.comps.items():
        for d in range(len(ch.directions)):
            dc = c.derive_dir(d)
            if dc.is_zero():
                continue
            m = _merge_keys((d,), k)
            if m is None:
                continue
            key, sign = m
            acc.setdefault(key, []).append(-dc if sign < 0 else dc)
    comps = {k: ScalarExpr.sum(ch, vs) for k, vs in acc.items()}
    return DiffForm(ch, omega.degree + 1, comps)


def interior(Z, omega):
    """i_Z omega for a vector field Z."""
    Z._check(omega)
    if Z.degree != 1:
        raise ValueError("interior product expects a vector field")
    ch = omega.chart
    acc = {}
    for (j,), zc in Z.comps.items():
        for k, c in omega.comps.items():
            if j not in k:
                continue
            pos = k.index(j)
            key = k[:pos] + k[pos + 1:]
            v = zc * c
            acc.setdefault(key, []).append(-v if (pos & 1) else v)
    comps = {k: ScalarExpr.sum(ch, vs) for k, vs in acc.items()}
    return DiffForm(ch, omega.degree - 1, comps)


def lie_derivative(Z, A):
    """L_Z on multivectors via the bracket, on forms via Cartan's formula."""
    if Z.degree != 1:
        raise ValueError("lie_derivative expects a vector field")
    if isinstance(A, DiffForm):
        return interior(Z, exterior_d(A)) + exterior_d(interior(Z, A))
    return schouten(Z, A)


def eval_form(omega, fields):
    """omega(X_1, ..., X_k) by full antisymmetric expansion."""
    ch = omega.chart
    k = omega.degree
    if len(fields) != k:
        raise ValueError("wrong number of arguments")
    if k == 0:
        return omega.comps.get((), ch.zero())
    from itertools import permutations
    terms = []
    for key, c in omega.comps.items():
        for perm in permutations(range(k)):
            sign = _perm_sign(perm)
            prod = c
            ok = True
            for slot, p in enumerate(perm):
                comp = fields[p].comps.get((key[slot],))
                if comp is None:
                    ok = False
                    break
                prod = prod * comp
            if ok:
                terms.append(-prod if sign < 0 else prod)
    return ScalarExpr.sum(ch, terms)


def _perm_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return sign
