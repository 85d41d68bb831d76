from fractions import Fraction

import pytest

from pcoupling.calculus import (DiffForm, MultiVector, PoissonTensor,
                                PreconditionError, coord_field, coord_form,
                                differential, eval_bivector, eval_form,
                                exterior_d, hamiltonian_vf, interior,
                                is_casimir, is_poisson_vf, jacobiator,
                                jacobiator_oracle, lichnerowicz_delta,
                                lie_derivative, schouten, sharp)
from pcoupling.ring import Chart

from conftest import random_scalar, rng_for


def so3(chart):
    x1, x2, x3 = (chart.var(n) for n in ("x1", "x2", "x3"))
    return MultiVector(chart, 2, {(1, 2): x1, (0, 2): -x2, (0, 1): x3})


def open_book(chart):
    x2, x3 = chart.var("x2"), chart.var("x3")
    return MultiVector(chart, 2, {(0, 1): x2, (0, 2): x3})


def zfields(chart):
    x2, x3 = chart.var("x2"), chart.var("x3")
    one = chart.one()
    z1 = MultiVector(chart, 1, {(0,): one})
    z2 = MultiVector(chart, 1, {(1,): x2, (2,): -x3})
    z3 = MultiVector(chart, 1, {(1,): x3})
    z4 = MultiVector(chart, 1, {(2,): x2})
    return z1, z2, z3, z4


def sgn(k):
    return -1 if k % 2 else 1


def random_mv(chart, rng, degree, deg=2, nterms=2):
    ndirs = len(chart.directions)
    comps = {}
    for _ in range(nterms):
        key = tuple(sorted(rng.sample(range(ndirs), degree)))
        c = random_scalar(chart, rng, deg=deg)
        comps[key] = comps.get(key, chart.zero()) + c
    return MultiVector(chart, degree, comps)


def random_form(chart, rng, degree, deg=2, nterms=2):
    mv = random_mv(chart, rng, degree, deg, nterms)
    return DiffForm(chart, degree, mv.comps)


def test_schouten_vector_fields_lie_bracket(r3):
    z1, z2, z3, z4 = zfields(r3)
    assert schouten(z2, z3) == -2 * z3
    assert schouten(z2, z4) == 2 * z4
    assert schouten(z3, z4) == -z2
    for z in (z2, z3, z4):
        assert schouten(z1, z).is_zero()


def test_schouten_trivial_cases(r3):
    d1 = coord_field(r3, "x1")
    x2 = r3.var("x2")
    v = x2 * coord_field(r3, "x2")
    assert schouten(d1, v).is_zero()
    f = MultiVector.from_scalar(x2 ** 2)
    assert schouten(d1, f).is_zero()
    assert schouten(v, f) == 2 * x2 ** 2 * MultiVector.from_scalar(r3.one())


def test_schouten_function_anchor(r3):
    # [X, f] = X(f) and [Psi, F] = -Psi#(dF)
    x1, x2 = r3.var("x1"), r3.var("x2")
    X = x2 * coord_field(r3, "x1")
    F = x1 * x2
    assert schouten(X, MultiVector.from_scalar(F)).as_scalar() == x2 ** 2
    psi = so3(r3)
    lhs = schouten(psi, MultiVector.from_scalar(F))
    assert lhs == -sharp(psi, differential(F))


def test_jacobiator_examples(r3):
    assert jacobiator(so3(r3)).is_zero()
    assert jacobiator(open_book(r3)).is_zero()
    const = MultiVector(r3, 2, {(0, 1): r3.one()})
    assert jacobiator(const).is_zero()
    x1, x2, x3 = (r3.var(n) for n in ("x1", "x2", "x3"))
    bad = MultiVector(r3, 2, {(0, 1): x1, (1, 2): x2, (0, 2): -x3})
    assert not jacobiator(bad).is_zero()


def test_jacobiator_oracle_relation(r3):
    rng = rng_for("jac-oracle")
    for _ in range(20):
        psi = random_mv(r3, rng, 2)
        assert jacobiator(psi) == -2 * jacobiator_oracle(psi)
    bad = MultiVector(r3, 2, {(0, 1): r3.var("x1"), (1, 2): r3.var("x2"),
                              (0, 2): -r3.var("x3")})
    assert not jacobiator_oracle(bad).is_zero()


def test_schouten_graded_antisymmetry(cyl):
    rng = rng_for("antisym")
    for _ in range(30):
        a = rng.randint(0, 2)
        b = rng.randint(0, 2)
        A = random_mv(cyl, rng, a)
        B = random_mv(cyl, rng, b)
        sign = sgn((a - 1) * (b - 1))
        lhs = schouten(A, B)
        rhs = schouten(B, A)
        assert lhs == (-sign) * rhs


def test_schouten_graded_leibniz(cyl):
    rng = rng_for("leibniz-schouten")
    for _ in range(25):
        a = rng.randint(0, 2)
        b = rng.randint(0, 1)
        c = rng.randint(0, 1)
        A = random_mv(cyl, rng, a, nterms=1)
        B = random_mv(cyl, rng, b, nterms=1)
        C = random_mv(cyl, rng, c, nterms=1)
        lhs = schouten(A, B.wedge(C))
        rhs = schouten(A, B).wedge(C) + sgn((a - 1) * b) * B.wedge(
            schouten(A, C))
        assert lhs == rhs


def test_schouten_graded_jacobi(cyl):
    rng = rng_for("jacobi-graded")
    for _ in range(15):
        a = rng.randint(1, 2)
        b = rng.randint(0, 2)
        c = rng.randint(0, 2)
        A = random_mv(cyl, rng, a, deg=1, nterms=1)
        B = random_mv(cyl, rng, b, deg=1, nterms=1)
        C = random_mv(cyl, rng, c, deg=1, nterms=1)
        lhs = schouten(A, schouten(B, C))
        rhs = schouten(schouten(A, B), C) + sgn((a - 1) * (b - 1)) * \
            schouten(B, schouten(A, C))
        assert lhs == rhs


def test_lichnerowicz_examples(r3):
    psi = PoissonTensor.verify(open_book(r3))
    z1, _, _, _ = zfields(r3)
    assert lichnerowicz_delta(psi, z1).is_zero()
    one = MultiVector.from_scalar(r3.one())
    assert lichnerowicz_delta(psi, one).is_zero()
    d2 = coord_field(r3, "x2")
    out = lichnerowicz_delta(psi, d2)
    expect = MultiVector(r3, 2, {(0, 1): r3.one()})
    assert out == expect or out == -expect


def test_lichnerowicz_requires_verified(r3):
    psi = PoissonTensor(so3(r3), verified=False)
    with pytest.raises(PreconditionError):
        lichnerowicz_delta(psi, coord_field(r3, "x1"))


def test_delta_squared_zero(r3):
    rng = rng_for("delta2")
    for psi_mv in (so3(r3), open_book(r3)):
        psi = PoissonTensor.verify(psi_mv)
        for _ in range(10):
            A = random_mv(r3, rng, rng.randint(0, 2))
            assert lichnerowicz_delta(psi, lichnerowicz_delta(psi, A)).is_zero()


def test_sharp_examples(r3):
    psi = open_book(r3)
    x2, x3 = r3.var("x2"), r3.var("x3")
    out = sharp(psi, coord_form(r3, "x1"))
    assert out == MultiVector(r3, 1, {(1,): x2, (2,): x3})
    # pairing anchor <dx2, Psi#dx1> = Psi(dx1, dx2)
    assert eval_bivector(psi, coord_form(r3, "x1"), coord_form(r3, "x2")) == x2
    blk = MultiVector(r3, 2, {(0, 1): r3.one()})
    assert sharp(blk, coord_form(r3, "x1")) == coord_field(r3, "x2")


def test_sharp_pairing_anchor_all_covectors(r3):
    psi = so3(r3)
    for i, ni in enumerate(("x1", "x2", "x3")):
        for nj in ("x1", "x2", "x3"):
            a, b = coord_form(r3, ni), coord_form(r3, nj)
            lhs = eval_form_pair(psi, a, b)
            assert lhs == eval_bivector(psi, a, b)


def eval_form_pair(psi, a, b):
    v = sharp(psi, a)
    out = v.chart.zero()
    for (k,), c in v.comps.items():
        bc = b.comps.get((k,))
        if bc is not None:
            out = out + c * bc
    return out


def test_casimir_and_poisson_fields(r3):
    so3p = PoissonTensor.verify(so3(r3))
    x1, x2, x3 = (r3.var(n) for n in ("x1", "x2", "x3"))
    assert is_casimir(so3p.bivector, x1 ** 2 + x2 ** 2 + x3 ** 2)
    la2 = PoissonTensor.verify(open_book(r3))
    assert not is_casimir(la2.bivector, x2)
    z1, z2, z3, z4 = zfields(r3)
    for z in (z1, z2, z3, z4):
        assert is_poisson_vf(la2, z)
    assert not is_poisson_vf(la2, x1 * z3)


def test_hamiltonian_bracket_compatibility(r3):
    # <dG, Psi#dF> = Psi(dF, dG) on random functions
    rng = rng_for("ham-bracket")
    psi = so3(r3)
    for _ in range(20):
        F = random_scalar(r3, rng)
        G = random_scalar(r3, rng)
        xf = hamiltonian_vf(psi, F)
        lhs = r3.zero()
        dG = differential(G)
        for (k,), c in xf.comps.items():
            gc = dG.comps.get((k,))
            if gc is not None:
                lhs = lhs + c * gc
        assert lhs == eval_bivector(psi, differential(F), differential(G))


def test_exterior_calculus(r3):
    x1 = r3.var("x1")
    w = x1 * coord_form(r3, "x2")
    dw = exterior_d(w)
    assert dw == DiffForm(r3, 2, {(0, 1): r3.one()})
    assert exterior_d(dw).is_zero()
    lv = lie_derivative(coord_field(r3, "x1"), x1 * coord_field(r3, "x2"))
    assert lv == coord_field(r3, "x2")
    w2 = coord_form(r3, "x1").wedge(coord_form(r3, "x2"))
    assert interior(coord_field(r3, "x2"), w2) == -coord_form(r3, "x1")


def test_d_squared_and_cartan_random(cyl):
    rng = rng_for("cartan")
    for _ in range(20):
        k = rng.randint(0, 2)
        w = random_form(cyl, rng, k)
        assert exterior_d(exterior_d(w)).is_zero()
        Z = random_mv(cyl, rng, 1)
        lhs = lie_derivative(Z, w)
        rhs = interior(Z, exterior_d(w)) + exterior_d(interior(Z, w))
        assert lhs == rhs


def test_wedge_graded_commutative(cyl):
    rng = rng_for("wedge")
    for _ in range(20):
        a = rng.randint(0, 2)
        b = rng.randint(0, 2)
        A = random_mv(cyl, rng, a)
        B = random_mv(cyl, rng, b)
        assert A.wedge(B) == sgn(a * b) * B.wedge(A)


def test_eval_form(r3):
    x1 = r3.var("x1")
    w = x1 * coord_form(r3, "x1").wedge(coord_form(r3, "x2"))
    v1 = coord_field(r3, "x1")
    v2 = coord_field(r3, "x2")
    assert eval_form(w, [v1, v2]) == x1
    assert eval_form(w, [v2, v1]) == -x1
