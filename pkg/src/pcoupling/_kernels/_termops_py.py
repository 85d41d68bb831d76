"""Pure-Python term-level kernels for sparse integer-coefficient polynomials.

A polynomial is a dict mapping exponent tuples (one slot per chart generator)
to nonzero Python ints.  Generators attached to a periodic coordinate come in
(cos, sin) pairs; every public operation that can raise a sin exponent above 1
rewrites sin^2 -> 1 - cos^2 eagerly, so canonical dicts always have sin
exponents 0 or 1.  ``sin_pairs`` is a tuple of (sin_index, cos_index) pairs.

The same API is provided by the compiled module ``_termops_cy``; the package
selects one at import time.
"""

from math import comb, gcd

BACKEND = "python"


def t_add(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def t_sub(a, b):
    if not b:
        return dict(a)
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) - c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def t_neg(a):
    return {e: -c for e, c in a.items()}


def t_scale(a, k):
    if k == 0:
        return {}
    if k == 1:
        return dict(a)
    return {e: c * k for e, c in a.items()}


def _reduce_term_into(out, exps, coeff, sin_pairs):
    # rewrite sin^(2k+r) = (1 - cos^2)^k sin^r, one periodic pair at a time
    for si, ci in sin_pairs:
        es = exps[si]
        if es >= 2:
            k, r = divmod(es, 2)
            base = list(exps)
            base[si] = r
            ec = base[ci]
            for j in range(k + 1):
                e2 = list(base)
                e2[ci] = ec + 2 * j
                _reduce_term_into(out, tuple(e2), coeff * comb(k, j) * (-1) ** j,
                                  sin_pairs)
            return
    s = out.get(exps, 0) + coeff
    if s:
        out[exps] = s
    else:
        out.pop(exps, None)


def t_reduce(a, sin_pairs):
    if not sin_pairs:
        return dict(a)
    for si, _ in sin_pairs:
        for e in a:
            if e[si] >= 2:
                break
        else:
            continue
        break
    else:
        return dict(a)
    out = {}
    for e, c in a.items():
        _reduce_term_into(out, e, c, sin_pairs)
    return out


def t_mul_free(a, b):
    """Product in the free polynomial ring (no trigonometric rewriting)."""
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def t_mul(a, b, sin_pairs):
    """Product in the quotient ring: trig relations applied eagerly."""
    if not a or not b:
        return {}
    if not sin_pairs:
        return t_mul_free(a, b)
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            _reduce_term_into(out, e, ca * cb, sin_pairs)
    return out


def t_pow(a, n, sin_pairs):
    if n == 0:
        return {(0,) * _width(a): 1} if a else {}
    out = None
    sq = a
    while n:
        if n & 1:
            out = sq if out is None else t_mul(out, sq, sin_pairs)
        n >>= 1
        if n:
            sq = t_mul(sq, sq, sin_pairs)
    return dict(out)


def _width(a):
    for e in a:
        return len(e)
    return 0


def t_derive_affine(a, gi):
    out = {}
    for e, c in a.items():
        k = e[gi]
        if k:
            e2 = e[:gi] + (k - 1,) + e[gi + 1:]
            s = out.get(e2, 0) + c * k
            if s:
                out[e2] = s
            else:
                del out[e2]
    return out


def t_derive_periodic(a, ci, si, sin_pairs):
    # d/dtheta with cos' = -sin, sin' = cos; may need one rewrite pass
    out = {}
    for e, c in a.items():
        ec, es = e[ci], e[si]
        if ec:
            e2 = list(e)
            e2[ci] = ec - 1
            e2[si] = es + 1
            _reduce_term_into(out, tuple(e2), -c * ec, sin_pairs)
        if es:
            e2 = list(e)
            e2[ci] = ec + 1
            e2[si] = es - 1
            _reduce_term_into(out, tuple(e2), c * es, sin_pairs)
    return out


def t_content(a):
    g = 0
    for c in a.values():
        g = gcd(g, c)
        if g == 1:
            return 1
    return g


def t_divexact_const(a, k):
    if k == 1:
        return dict(a)
    return {e: c // k for e, c in a.items()}


def t_lead(a):
    e = max(a)
    return e, a[e]


class NotDivisible(Exception):
    pass


def t_divexact(a, b):
    """Exact division in the free ring; raises NotDivisible on failure."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    eb, cb = t_lead(b)
    q = {}
    r = dict(a)
    while r:
        er, cr = t_lead(r)
        de = tuple(x - y for x, y in zip(er, eb))
        if any(x < 0 for x in de):
            raise NotDivisible
        qc, rem = divmod(cr, cb)
        if rem:
            raise NotDivisible
        q[de] = qc
        for e2, c2 in b.items():
            e3 = tuple(x + y for x, y in zip(de, e2))
            s = r.get(e3, 0) - qc * c2
            if s:
                r[e3] = s
            else:
                del r[e3]
    return q


def _vars_present(a, b):
    n = _width(a) if a else _width(b)
    seen = [0] * n
    for src in (a, b):
        for e in src:
            for i, x in enumerate(e):
                if x:
                    seen[i] = 1
    return [i for i, f in enumerate(seen) if f]


def _to_univar(a, v):
    out = {}
    for e, c in a.items():
        d = e[v]
        e2 = e[:v] + (0,) + e[v + 1:]
        sub = out.setdefault(d, {})
        s = sub.get(e2, 0) + c
        if s:
            sub[e2] = s
        else:
            del sub[e2]
    return {d: sub for d, sub in out.items() if sub}


def _shift(a, v, d):
    return {e[:v] + (e[v] + d,) + e[v + 1:]: c for e, c in a.items()}


def _prem(A, B):
    # pseudo-remainder of A by B in the (implicit) main variable of the maps
    db = max(B)
    lb = B[db]
    r = A
    while r and max(r) >= db:
        dr = max(r)
        lr = r[dr]
        new = {}
        for d, sub in r.items():
            if d == dr:
                continue
            new[d] = t_mul_free(sub, lb)
        for d, sub in B.items():
            if d == db:
                continue
            dd = d + dr - db
            cur = t_sub(new.get(dd, {}), t_mul_free(sub, lr))
            if cur:
                new[dd] = cur
            else:
                new.pop(dd, None)
        r = {d: sub for d, sub in new.items() if sub}
    return r


def _univar_content(A):
    g = {}
    for d in sorted(A, reverse=True):
        g = t_gcd(g, A[d])
        if len(g) == 1:
            e, c = t_lead(g)
            if c in (1, -1) and not any(e):
                break
    return g


def _univar_divexact(A, g):
    return {d: t_divexact(sub, g) for d, sub in A.items()}


def _prs_gcd(a, b):
    """GCD in the free ring Z[generators] by primitive PRS (fallback path)."""
    if not a:
        return _pos_lead(dict(b))
    if not b:
        return _pos_lead(dict(a))
    vs = _vars_present(a, b)
    if not vs:
        ea, ca = t_lead(a)
        eb, cb = t_lead(b)
        return {ea: gcd(ca, cb)}
    v = vs[-1]
    ua, ub = _to_univar(a, v), _to_univar(b, v)
    if max(ua) == 0 or max(ub) == 0:
        # one input is free of the main variable: gcd with the other's content
        base = ua[0] if max(ua) == 0 else ub[0]
        other = ub if max(ua) == 0 else ua
        return _pos_lead(_prs_gcd(base, _univar_content(other)))
    ca_, cb_ = _univar_content(ua), _univar_content(ub)
    pa, pb = _univar_divexact(ua, ca_), _univar_divexact(ub, cb_)
    if max(pa) < max(pb):
        pa, pb = pb, pa
    while pb:
        r = _prem(pa, pb)
        pa, pb = pb, (_univar_divexact(r, _univar_content(r)) if r else r)
    g = _from_univar(pa, v)
    g = t_mul_free(g, _prs_gcd(ca_, cb_))
    return _pos_lead(g)


def _max_norm(a):
    return max(abs(c) for c in a.values())


def _eval_var(a, v, xi):
    """Evaluate generator v at the integer xi (collapsing that exponent)."""
    powers = {}
    out = {}
    for e, c in a.items():
        k = e[v]
        if k:
            p = powers.get(k)
            if p is None:
                p = powers[k] = xi ** k
            c = c * p
        e2 = e[:v] + (0,) + e[v + 1:]
        s = out.get(e2, 0) + c
        if s:
            out[e2] = s
        else:
            out.pop(e2, None)
    return out


def _interp_var(g_int, v, xi):
    """Balanced xi-adic reconstruction of a polynomial in generator v."""
    half = xi // 2
    out = {}
    cur = dict(g_int)
    k = 0
    while cur:
        digit = {}
        nxt = {}
        for e, c in cur.items():
            d = c % xi
            if d > half:
                d -= xi
            if d:
                digit[e] = d
            q = (c - d) // xi
            if q:
                nxt[e] = q
        for e, d in digit.items():
            out[e[:v] + (k,) + e[v + 1:]] = d
        cur = nxt
        k += 1
        if k > 10000:
            return None
    return out


def _divides(a, b):
    try:
        t_divexact(a, b)
        return True
    except NotDivisible:
        return False


def _heugcd(a, b, depth=0):
    """Heuristic evaluation/reconstruction GCD; None when it gives up."""
    if not a or not b:
        return _pos_lead(dict(a or b))
    vs = _vars_present(a, b)
    if not vs:
        ea, ca = t_lead(a)
        eb, cb = t_lead(b)
        return {ea: gcd(ca, cb)}
    if depth > 12:
        return None
    v = vs[-1]
    xi = 2 * min(_max_norm(a), _max_norm(b)) + 29
    for _ in range(6):
        A = _eval_var(a, v, xi)
        B = _eval_var(b, v, xi)
        if A and B:
            G = _heugcd(A, B, depth + 1)
            if G is not None:
                g = _interp_var(G, v, xi)
                if g:
                    cg = t_content(g)
                    if cg > 1:
                        g = t_divexact_const(g, cg)
                    if _divides(a, g) and _divides(b, g):
                        return _pos_lead(g)
        xi = (xi * 73537) // 32768
        xi += 1 - (xi & 1)  # keep it odd
    return None


def _strip_monomial(a):
    mins = None
    for e in a:
        if mins is None:
            mins = list(e)
        else:
            mins = [min(x, y) for x, y in zip(mins, e)]
        if not any(mins):
            return a, None
    shift = tuple(mins)
    return {tuple(x - y for x, y in zip(e, shift)): c
            for e, c in a.items()}, shift


def t_gcd(a, b):
    """GCD in the free ring Z[generators], positive leading coefficient.

    Strips the common monomial and integer content, then tries the
    evaluation-homomorphism heuristic; primitive PRS is the safety net."""
    if not a:
        return _pos_lead(dict(b))
    if not b:
        return _pos_lead(dict(a))
    if a == b:
        return _pos_lead(dict(a))
    a1, sa = _strip_monomial(a)
    b1, sb = _strip_monomial(b)
    ca, cb = t_content(a1), t_content(b1)
    if ca > 1:
        a1 = t_divexact_const(a1, ca)
    if cb > 1:
        b1 = t_divexact_const(b1, cb)
    g0 = gcd(ca, cb)
    if len(a1) == 1 or len(b1) == 1:
        # gcd with a monomial is the common monomial part already stripped
        g = {}
    else:
        g = _heugcd(a1, b1)
        if g is None:
            g = _prs_gcd(a1, b1)
    width = len(next(iter(a)))
    e0 = (0,) * width
    if not g:
        g = {e0: 1}
    if g0 > 1:
        g = t_scale(g, g0)
    if sa is not None and sb is not None:
        common = tuple(min(x, y) for x, y in zip(sa, sb))
        if any(common):
            g = {tuple(x + y for x, y in zip(e, common)): c
                 for e, c in g.items()}
    return _pos_lead(g)


def _from_univar(A, v):
    out = {}
    for d, sub in A.items():
        for e, c in sub.items():
            out[e[:v] + (d,) + e[v + 1:]] = c
    return out


def _pos_lead(a):
    if a and a[max(a)] < 0:
        return {e: -c for e, c in a.items()}
    return a


def t_subst_zero(a, gis):
    out = {}
    for e, c in a.items():
        if all(e[g] == 0 for g in gis):
            out[e] = c
    return out


def t_subst_rat(a, gi, pnum, pden):
    """Substitute generator gi by pnum/pden; returns (terms, scale) with the
    result equal to terms / (pden**scale_pow) -- scale is pden**max_exp."""
    if not a:
        return {}, 1
    dmax = max(e[gi] for e in a)
    out = {}
    for e, c in a.items():
        k = e[gi]
        e2 = e[:gi] + (0,) + e[gi + 1:]
        s = out.get(e2, 0) + c * pnum ** k * pden ** (dmax - k)
        if s:
            out[e2] = s
        else:
            out.pop(e2, None)
    return out, pden ** dmax
