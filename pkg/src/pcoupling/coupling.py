"""Coupling Poisson tensors: geometric data, structure equations, the bigraded
complex, and the automorphism machinery.

Conventions pinned here (all verified by the acceptance suite):

* base-base block M_ij = Pi(du^i, du^j); the coupling form matrix is
  S = -M^{-1} and conversely M = -S^{-1};
* normalizing matrix for horizontal lifts: hor_i = sum_j (M^{-1})_ij Pi#(du^j);
* structure-equation residuals: cc1 = [P,P], cc2_i = L_{hor_i} P,
  cc3_ij = Curv_ij + P#(d sigma_ij), cc4 = cov_ext_d(sigma);
* the module differential is dS + dG + dP with dS = -ad_sigma,
  dG the covariant exterior derivative, and (ad_P eta)(u) = (-1)^p [P, eta(u)].
"""

from fractions import Fraction
from itertools import combinations

from pcoupling.calculus import (DiffForm, MultiVector, PoissonTensor,
                                PreconditionError, differential, eval_bivector,
                                jacobiator, schouten, sharp)
from pcoupling.fibration import (BundleChart, Connection, VValuedForm,
                                 bigrade, cov_ext_d, curvature, from_bigraded)
from pcoupling.ring import RingError, ScalarExpr


class NotCouplingError(RingError):
    pass


class StructureEquationError(RingError):
    def __init__(self, which, residual):
        super().__init__(f"structure equation {which} violated: {residual}")
        self.which = which
        self.residual = residual


class DomainError(RingError):
    pass


# -- geometric data -----------------------------------------------------------

class GeometricData:
    """The triple (connection, coupling form, vertical Poisson tensor)."""

    def __init__(self, conn, sigma, P):
        bc = conn.bchart
        if sigma.p != 2 or sigma.q != 0:
            raise ValueError("coupling form must be a (2,0) element")
        if P.degree != 2 or not bc.is_vertical(P):
            raise ValueError("vertical tensor must be a vertical bivector")
        self.conn = conn
        self.sigma = sigma
        self.P = P
        self.bchart = bc
        self._report = None

    def sigma_matrix(self):
        ch = self.bchart.chart
        m = self.bchart.m
        S = [[ch.zero() for _ in range(m)] for _ in range(m)]
        for (i, j), val in self.sigma.comps.items():
            f = val.as_scalar()
            S[i][j] = f
            S[j][i] = -f
        return S

    def verify(self):
        if self._report is None:
            self._report = verify_structure_equations(self)
        return self._report

    @property
    def integrable(self):
        return self.verify().ok

    def require_integrable(self):
        rep = self.verify()
        if not rep.ok:
            raise StructureEquationError(rep.first_violation,
                                         rep.residual_strings()[rep.first_violation])


class StructureReport:
    """Residuals of the four structure equations, exactly zero when they hold."""

    def __init__(self, cc1, cc2, cc3, cc4):
        self.cc1 = cc1      # multivector [P,P]
        self.cc2 = cc2      # list per base slot: L_{hor_i} P
        self.cc3 = cc3      # dict (i,j) -> vertical field residual
        self.cc4 = cc4      # (3,0) element
        self.flags = {
            "CC1": cc1.is_zero(),
            "CC2": all(v.is_zero() for v in cc2),
            "CC3": all(v.is_zero() for v in cc3.values()),
            "CC4": cc4.is_zero(),
        }

    @property
    def ok(self):
        return all(self.flags.values())

    @property
    def first_violation(self):
        for name, ok in self.flags.items():
            if not ok:
                return name
        return None

    def residual_strings(self):
        out = {}
        if not self.flags["CC1"]:
            out["CC1"] = str(self.cc1)
        if not self.flags["CC2"]:
            out["CC2"] = "; ".join(str(v) for v in self.cc2 if not v.is_zero())
        if not self.flags["CC3"]:
            out["CC3"] = "; ".join(f"({i},{j}): {v}" for (i, j), v
                                   in sorted(self.cc3.items())
                                   if not v.is_zero())
        if not self.flags["CC4"]:
            out["CC4"] = str(self.cc4)
        return out


def verify_structure_equations(data):
    bc = data.bchart
    conn = data.conn
    P = data.P
    cc1 = schouten(P, P)
    cc2 = [schouten(conn.hor(i), P) for i in range(bc.m)]
    curv = curvature(conn)
    S = data.sigma_matrix()
    cc3 = {}
    for i in range(bc.m):
        for j in range(i + 1, bc.m):
            res = curv.value((i, j)) + sharp(P, differential(S[i][j]))
            cc3[(i, j)] = res
    cc4 = cov_ext_d(conn, data.sigma)
    return StructureReport(cc1, cc2, cc3, cc4)


# -- coupling tensors ---------------------------------------------------------

class CouplingTensor:
    """A Jacobi-verified Poisson tensor together with its bundle chart and the
    lazily extracted geometric data."""

    def __init__(self, pi, bchart, data=None):
        self.pi = pi
        self.bchart = bchart
        self._data = data

    @property
    def chart(self):
        return self.bchart.chart

    @property
    def data(self):
        if self._data is None:
            self._data = extract_data(self.pi, self.bchart)
        return self._data


def base_block(pi_mv, bc):
    """The m-by-m matrix Pi(du^i, du^j) of base coordinate differentials."""
    ch = bc.chart
    m = bc.m
    M = [[ch.zero() for _ in range(m)] for _ in range(m)]
    for (d1, d2), c in pi_mv.comps.items():
        i = bc.base_slot.get(d1)
        j = bc.base_slot.get(d2)
        if i is not None and j is not None:
            M[i][j] = c
            M[j][i] = -c
    return M


def _matrix_inverse(M):
    """Inverse of a matrix over the scalar field; None when singular."""
    m = len(M)
    ch = M[0][0].chart if m else None
    aug = [[M[i][j] for j in range(m)] +
           [ch.one() if i == j else ch.zero() for j in range(m)]
           for i in range(m)]
    for col in range(m):
        piv = None
        for r in range(col, m):
            if not aug[r][col].is_zero():
                piv = r
                break
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(m):
            if r != col and not aug[r][col].is_zero():
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[m:] for row in aug]


def is_coupling(pi, bc):
    """Whether the horizontal bundle Pi#(V0) complements the vertical bundle.

    Returns (flag, reason)."""
    if isinstance(pi, PoissonTensor):
        pi.require_verified()
        pi = pi.bivector
    m = bc.m
    if m == 0:
        return False, "no base variables"
    M = base_block(pi, bc)
    if m % 2 == 1:
        return False, f"odd base dimension {m}: antisymmetric block is singular"
    inv = _matrix_inverse(M)
    if inv is None:
        return False, "base-base block Pi(du^i, du^j) is singular"
    return True, ""


def extract_data(pi, bc):
    """Geometric data of a coupling tensor; raises NotCouplingError otherwise."""
    if isinstance(pi, PoissonTensor):
        pi.require_verified()
        pi_mv = pi.bivector
    else:
        pi_mv = pi
    ok, reason = is_coupling(pi_mv, bc)
    if not ok:
        raise NotCouplingError(reason)
    ch = bc.chart
    m = bc.m
    M = base_block(pi_mv, bc)
    A = _matrix_inverse(M)
    # gamma_i^a: fiber components of sum_j A_ij Pi#(du^j)
    sharps = []
    for j in range(m):
        du = DiffForm(ch, 1, {(bc.base_dirs[j],): ch.one()})
        sharps.append(sharp(pi_mv, du))
    coeffs = {}
    for i in range(m):
        for a in range(bc.n):
            d = bc.fiber_dirs[a]
            total = ScalarExpr.sum(ch, (
                A[i][j] * sharps[j].comps[(d,)]
                for j in range(m) if (d,) in sharps[j].comps))
            if not total.is_zero():
                coeffs[(i, a)] = total
    conn = Connection(bc, coeffs)
    # sigma matrix: S = -M^{-1}
    sig = {}
    for i in range(m):
        for j in range(i + 1, m):
            v = -A[i][j]
            if not v.is_zero():
                sig[(i, j)] = MultiVector.from_scalar(v)
    sigma = VValuedForm(bc, 2, 0, sig)
    parts = bigrade(pi_mv, conn)
    if (1, 1) in parts:
        raise NotCouplingError("tensor has a (1,1) component for its own "
                               "connection")
    vert = parts.get((0, 2))
    P = vert.value(()) if vert is not None else MultiVector.zero(ch, 2)
    return GeometricData(conn, sigma, P)


def build_coupling(data, verify_jacobi=True):
    """Build the coupling tensor of integrable geometric data."""
    data.require_integrable()
    bc = data.bchart
    ch = bc.chart
    S = data.sigma_matrix()
    Minv = _matrix_inverse(S)
    if Minv is None:
        raise NotCouplingError("coupling form is degenerate")
    m = bc.m
    total = data.P
    for i in range(m):
        for j in range(i + 1, m):
            c = -Minv[i][j]     # M = -S^{-1}
            if c.is_zero():
                continue
            total = total + c * conn_hor_wedge(data.conn, i, j)
    if verify_jacobi:
        pi = PoissonTensor.verify(total)
    else:
        pi = PoissonTensor(total)
    return CouplingTensor(pi, bc, data=data)


def conn_hor_wedge(conn, i, j):
    return conn.hor(i).wedge(conn.hor(j))


# -- the bigraded module ------------------------------------------------------

class MElement:
    """Finite sum of bigraded components {(p,q): VValuedForm}."""

    __slots__ = ("bchart", "parts")

    def __init__(self, bchart, parts=None, clean=True):
        self.bchart = bchart
        parts = dict(parts or {})
        if clean:
            parts = {k: v for k, v in parts.items() if not v.is_zero()}
        self.parts = parts

    @classmethod
    def of(cls, vv):
        return cls(vv.bchart, {(vv.p, vv.q): vv})

    def part(self, p, q):
        got = self.parts.get((p, q))
        if got is None:
            return VValuedForm.zero(self.bchart, p, q)
        return got

    def is_zero(self):
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, MElement):
            return NotImplemented
        return self.bchart == other.bchart and self.parts == other.parts

    __hash__ = None

    def __add__(self, other):
        out = dict(self.parts)
        for k, v in other.parts.items():
            got = out.get(k)
            s = v if got is None else got + v
            if s.is_zero():
                out.pop(k, None)
            else:
                out[k] = s
        return MElement(self.bchart, out, clean=False)

    def __neg__(self):
        return MElement(self.bchart,
                        {k: -v for k, v in self.parts.items()}, clean=False)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, f):
        return MElement(self.bchart, {k: f * v for k, v in self.parts.items()})

    def total_degrees(self):
        return sorted({p + q for p, q in self.parts})

    def __str__(self):
        if not self.parts:
            return "0"
        return " + ".join(f"{{{p},{q}}}[{v}]"
                          for (p, q), v in sorted(self.parts.items()))

    __repr__ = __str__


def _shuffle_sign(picks):
    # parity of moving picked positions to the front, preserving order
    inv = 0
    for rank, i in enumerate(picks):
        inv += i - rank
    return -1 if inv % 2 else 1


def m_wedge(eta, theta):
    """Wedge on the bigraded module with the (-1)^{p' q} twist."""
    bc = eta.bchart
    p, q = eta.p, eta.q
    pp, qq = theta.p, theta.q
    twist = -1 if (pp * q) % 2 else 1
    acc = {}
    for key in combinations(range(bc.m), p + pp):
        total = None
        for picks in combinations(range(p + pp), p):
            left = tuple(key[i] for i in picks)
            right = tuple(key[i] for i in range(p + pp) if i not in picks)
            a = eta.comps.get(left)
            b = theta.comps.get(right)
            if a is None or b is None:
                continue
            term = a.wedge(b)
            if term.is_zero():
                continue
            if _shuffle_sign(picks) * twist < 0:
                term = -term
            total = term if total is None else total + term
        if total is not None and not total.is_zero():
            acc[key] = total
    return VValuedForm(bc, p + pp, q + qq, acc)


def m_bracket(eta, theta):
    """Bracket on the bigraded module with the (-1)^{p'(q-1)} twist."""
    bc = eta.bchart
    p, q = eta.p, eta.q
    pp, qq = theta.p, theta.q
    twist = -1 if (pp * (q - 1)) % 2 else 1
    acc = {}
    for key in combinations(range(bc.m), p + pp):
        total = None
        for picks in combinations(range(p + pp), p):
            left = tuple(key[i] for i in picks)
            right = tuple(key[i] for i in range(p + pp) if i not in picks)
            a = eta.comps.get(left)
            b = theta.comps.get(right)
            if a is None or b is None:
                continue
            term = schouten(a, b)
            if term.is_zero():
                continue
            if _shuffle_sign(picks) * twist < 0:
                term = -term
            total = term if total is None else total + term
        if total is not None and not total.is_zero():
            acc[key] = total
    return VValuedForm(bc, p + pp, q + qq - 1, acc)


def ad_p(P, eta):
    """(ad_P eta)(u_1..u_p) = (-1)^p [P, eta(u_1..u_p)]; bidegree (0,+1)."""
    sign = -1 if eta.p % 2 else 1
    comps = {}
    for key, val in eta.comps.items():
        v = schouten(P, val)
        if not v.is_zero():
            comps[key] = -v if sign < 0 else v
    return VValuedForm(eta.bchart, eta.p, eta.q + 1, comps)


def ad_sigma(data, eta):
    """ad_sigma = [sigma, .] via the module bracket; bidegree (+2,-1)."""
    return m_bracket(data.sigma, eta)


def m_differential(data, eta):
    """The coboundary dS + dG + dP of the bigraded complex; returns MElement."""
    data.require_integrable()
    if isinstance(eta, VValuedForm):
        eta = MElement.of(eta)
    out = MElement(eta.bchart)
    for vv in eta.parts.values():
        pieces = MElement(eta.bchart)
        if vv.q >= 1:
            pieces = pieces + MElement.of(-ad_sigma(data, vv))
        pieces = pieces + MElement.of(cov_ext_d(data.conn, vv))
        pieces = pieces + MElement.of(ad_p(data.P, vv))
        out = out + pieces
    return out


def component_operators(data):
    """The three bigraded pieces as functions on homogeneous elements."""
    def dS(vv):
        return -ad_sigma(data, vv) if vv.q >= 1 else \
            VValuedForm.zero(vv.bchart, vv.p + 2, vv.q - 1)

    def dG(vv):
        return cov_ext_d(data.conn, vv)

    def dP(vv):
        return ad_p(data.P, vv)
    return dS, dG, dP


def cobracket_relation_residuals(data, vv):
    """The four anticommutator relations of the bigraded coboundary applied to
    one homogeneous element; all must vanish for integrable data."""
    dS, dG, dP = component_operators(data)
    r1 = dP(dP(vv))
    r2 = dG(dP(vv)) + dP(dG(vv))
    r3 = dS(dP(vv)) + dP(dS(vv)) + dG(dG(vv))
    r4 = dS(dG(vv)) + dG(dS(vv))
    return r1, r2, r3, r4


# -- the isomorphism with the Lichnerowicz complex ---------------------------

def flat_sigma(ct, A):
    """The exterior-algebra isomorphism onto the bigraded module."""
    data = ct.data
    bc = ct.bchart
    ch = bc.chart
    S = data.sigma_matrix()
    parts = bigrade(A, data.conn)
    out = {}
    for (p, q), vv in parts.items():
        sign = -1 if p % 2 else 1
        comps = {}
        for key in combinations(range(bc.m), p):
            # (flat A)(u_{j1}..u_{jp}) = (-1)^p sum_I det(S[j_r, i_s]) A_I
            total = None
            for ikey, val in vv.comps.items():
                det = _det([[S[key[r]][ikey[s]] for s in range(p)]
                            for r in range(p)], ch)
                if det.is_zero():
                    continue
                term = det * val
                total = term if total is None else total + term
            if total is not None and not total.is_zero():
                comps[key] = total if sign > 0 else -total
        el = VValuedForm(bc, p, q, comps)
        if not el.is_zero():
            out[(p, q)] = el
    return MElement(bc, out)


def _det(M, ch):
    n = len(M)
    if n == 0:
        return ch.one()
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    total = ch.zero()
    for j in range(n):
        if M[0][j].is_zero():
            continue
        minor = [[M[r][c] for c in range(n) if c != j] for r in range(1, n)]
        term = M[0][j] * _det(minor, ch)
        total = total + (term if j % 2 == 0 else -term)
    return total


def sharp_h(ct, alpha):
    """sharp_H(alpha) = Pi_{2,0}#(pi^* alpha) as a horizontal vector field."""
    bc = ct.bchart
    ch = bc.chart
    if alpha.p != 1 or alpha.q != 0:
        raise ValueError("sharp_H expects a (1,0) element")
    S = ct.data.sigma_matrix()
    Minv = _matrix_inverse(S)
    out = None
    for (j,), val in alpha.comps.items():
        aj = val.as_scalar()
        for i in range(bc.m):
            c = -(Minv[j][i]) * aj      # M_{ji} with M = -S^{-1}
            if c.is_zero():
                continue
            term = c * ct.data.conn.hor(i)
            out = term if out is None else out + term
    return out if out is not None else MultiVector.zero(ch, 1)


def sharp_h_inv(ct, X):
    """Inverse of sharp_H on horizontal fields: returns the (1,0) element."""
    bc = ct.bchart
    ch = bc.chart
    # X = sum_i b_i hor_i; b_i are the base components
    b = {}
    for i in range(bc.m):
        c = X.comps.get((bc.base_dirs[i],))
        if c is not None:
            b[i] = c
    resid = X
    conn = ct.data.conn
    for i, c in b.items():
        resid = resid - c * conn.hor(i)
    if not resid.is_zero():
        raise ValueError("field is not horizontal for the coupling connection")
    S = ct.data.sigma_matrix()
    # alpha_j solves b_i = sum_j alpha_j M_{ji}; M = -S^{-1} so alpha = -S^T b
    comps = {}
    for j in range(bc.m):
        total = ScalarExpr.sum(ch, (-(S[j][i]) * b[i] for i in b))
        if not total.is_zero():
            comps[(j,)] = MultiVector.from_scalar(total)
    return VValuedForm(bc, 1, 0, comps)


def vertical_part(ct, X):
    """pr_V of a vector field for the coupling connection."""
    parts = bigrade(X, ct.data.conn)
    vv = parts.get((0, 1))
    if vv is None:
        return MultiVector.zero(ct.chart, 1)
    return vv.value(())


def bar_partial(data, alpha):
    """Restriction of the covariant exterior derivative to Casimir-valued
    base forms; raises DomainError when a coefficient is not a Casimir."""
    require_casimir_valued(data, alpha, "bar_partial input")
    out = cov_ext_d(data.conn, alpha)
    require_casimir_valued(data, out, "bar_partial output")
    return out


def casimir_valued(data, alpha):
    for key, val in alpha.comps.items():
        if not sharp(data.P, differential(val.as_scalar())).is_zero():
            return False, key
    return True, None


def require_casimir_valued(data, alpha, what):
    ok, key = casimir_valued(data, alpha)
    if not ok:
        raise DomainError(
            f"{what}: coefficient at {key} is not a Casimir of the vertical "
            f"tensor: {alpha.comps[key].as_scalar()}")


def cocycle1_residuals(data, eta):
    """The three coupled cocycle equations for a 1-element (beta + Y)."""
    dS, dG, dP = component_operators(data)
    beta = eta.part(1, 0)
    Y = eta.part(0, 1)
    eq1 = dP(Y)
    eq2 = dG(Y) + dP(beta)
    eq3 = dG(beta) + dS(Y)
    return eq1, eq2, eq3


class Cocycle1:
    """A 1-cochain beta + Y with cached closedness flags."""

    def __init__(self, data, beta, Y):
        self.data = data
        self.beta = beta
        self.Y = Y
        el = MElement(data.bchart)
        if beta is not None and not beta.is_zero():
            el = el + MElement.of(beta)
        if Y is not None and not Y.is_zero():
            el = el + MElement.of(VValuedForm.from_vertical(data.bchart, Y))
        self.element = el
        r1, r2, r3 = cocycle1_residuals(data, self.element)
        self.closed = r1.is_zero() and r2.is_zero() and r3.is_zero()
