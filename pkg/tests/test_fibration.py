import pytest

from pcoupling.calculus import (MultiVector, PoissonTensor, PreconditionError,
                                coord_field, differential, exterior_d,
                                schouten)
from pcoupling.fibration import (BundleChart, Connection, NotProjectableError,
                                 VValuedForm, bigrade, cov_d_squared_via_curvature,
                                 cov_ext_d, curvature, foliated_d,
                                 from_bigraded, project_poisson,
                                 prop_identity_residual, pullback_check)
from pcoupling.ring import Chart

from conftest import random_scalar, rng_for
from test_calculus import open_book, random_mv, so3


@pytest.fixture
def prod_chart():
    return Chart.make(base=["u", "v"], fiber=["x1", "x2", "x3"])


@pytest.fixture
def small_bundle():
    # 2-dimensional base, single fiber coordinate
    return BundleChart(Chart.make(base=["u1", "u2"], fiber=["y1"]))


def random_vvform(bc, rng, p, q, deg=2):
    from itertools import combinations
    keys = list(combinations(range(bc.m), p))
    comps = {}
    for key in keys:
        if rng.random() < 0.7:
            comps[key] = random_mv_vertical(bc, rng, q, deg)
    return VValuedForm(bc, p, q, comps)


def random_mv_vertical(bc, rng, q, deg=2):
    comps = {}
    for _ in range(2):
        key = tuple(sorted(rng.sample(bc.fiber_dirs, q)))
        c = random_scalar(bc.chart, rng, deg=deg)
        comps[key] = comps.get(key, bc.chart.zero()) + c
    return MultiVector(bc.chart, q, comps)


def test_bigrade_trivial_connection(prod_chart):
    bc = BundleChart(prod_chart)
    conn = Connection.trivial(bc)
    A = coord_field(prod_chart, "u").wedge(coord_field(prod_chart, "x1"))
    parts = bigrade(A, conn)
    assert set(parts) == {(1, 1)}
    assert parts[(1, 1)].comps[(0,)] == coord_field(prod_chart, "x1")


def test_bigrade_resummation_random(prod_chart):
    bc = BundleChart(prod_chart)
    rng = rng_for("bigrade")
    coeffs = {(0, 0): prod_chart.var("x1") * prod_chart.var("u"),
              (1, 2): prod_chart.var("v") ** 2}
    conn = Connection(bc, {k: v for k, v in coeffs.items()})
    for _ in range(25):
        k = rng.randint(0, 3)
        A = random_mv(prod_chart, rng, k)
        parts = bigrade(A, conn)
        assert from_bigraded(parts, conn) == A
        for (p, q) in parts:
            assert p + q == k


def test_bigrade_curved_base_plane(small_bundle):
    # d/du1 ^ d/du2 with gamma_1^1 = y1: components (2,0),(1,1),(0,2)?
    ch = small_bundle.chart
    conn = Connection(small_bundle, {(0, 0): ch.var("y1")})
    A = coord_field(ch, "u1").wedge(coord_field(ch, "u2"))
    parts = bigrade(A, conn)
    assert from_bigraded(parts, conn) == A
    assert (2, 0) in parts and (1, 1) in parts
    # hor1 = d_u1 + y1 d_y1, so d_u1 = hor1 - y1 d_y1; no (0,2) on 1-dim fiber
    assert (0, 2) not in parts


def test_curvature_trivial_and_curved(small_bundle):
    ch = small_bundle.chart
    assert curvature(Connection.trivial(small_bundle)).is_zero()
    conn = Connection(small_bundle, {(0, 0): ch.var("u2")})
    curv = curvature(conn)
    expect = -1 * coord_field(ch, "y1")
    assert curv.comps[(0, 1)] == expect


def test_hor_bracket_projectability(small_bundle):
    # [hor_i, Y] stays vertical for vertical Y
    ch = small_bundle.chart
    rng = rng_for("hor-proj")
    conn = Connection(small_bundle, {(0, 0): random_scalar(ch, rng),
                                     (1, 0): random_scalar(ch, rng)})
    for _ in range(10):
        Y = random_mv_vertical(small_bundle, rng, 1)
        for i in range(small_bundle.m):
            assert small_bundle.is_vertical(schouten(conn.hor(i), Y))


def test_cov_ext_d_function_trivial(prod_chart):
    bc = BundleChart(prod_chart)
    conn = Connection.trivial(bc)
    f = prod_chart.var("u") ** 2 * prod_chart.var("v")
    eta = VValuedForm.from_function(bc, f)
    d = cov_ext_d(conn, eta)
    assert d.value((0,)).as_scalar() == f.derive("u")
    assert d.value((1,)).as_scalar() == f.derive("v")


def test_bianchi_identity(small_bundle, prod_chart):
    rng = rng_for("bianchi")
    charts = [(small_bundle, {(0, 0): small_bundle.chart.var("u2") ** 2}),
              (BundleChart(prod_chart),
               {(0, 0): prod_chart.var("x2") * prod_chart.var("u"),
                (1, 1): prod_chart.var("x1")})]
    for bc, coeffs in charts:
        conn = Connection(bc, coeffs)
        assert cov_ext_d(conn, curvature(conn)).is_zero()


def test_curvature_identity_cur2(prod_chart):
    bc = BundleChart(prod_chart)
    ch = prod_chart
    rng = rng_for("cur2")
    conn = Connection(bc, {(0, 0): ch.var("x2") * ch.var("u"),
                           (1, 1): ch.var("x1") * ch.var("v")})
    for _ in range(8):
        p = rng.randint(0, 1)
        q = rng.randint(0, 1)
        eta = random_vvform(bc, rng, p, q, deg=1)
        lhs = cov_ext_d(conn, cov_ext_d(conn, eta))
        rhs = cov_d_squared_via_curvature(conn, eta)
        assert lhs == rhs


def test_flat_cov_d_squared(prod_chart):
    bc = BundleChart(prod_chart)
    conn = Connection.trivial(bc)
    rng = rng_for("flat-d2")
    for _ in range(10):
        eta = random_vvform(bc, rng, rng.randint(0, 1), rng.randint(0, 2))
        assert cov_ext_d(conn, cov_ext_d(conn, eta)).is_zero()


def test_pullback_and_prop_identity(prod_chart):
    bc = BundleChart(prod_chart)
    ch = prod_chart
    f = ch.var("u")
    eta = VValuedForm(bc, 1, 0, {(0,): MultiVector.from_scalar(f)})
    w = pullback_check(eta)
    assert w.comps == {(0,): f}
    rng = rng_for("prop")
    conn = Connection(bc, {(0, 0): ch.var("x2"), (1, 2): ch.var("u")})
    for _ in range(8):
        p = rng.randint(0, 1)
        eta = random_vvform(bc, rng, p, 0)
        assert prop_identity_residual(conn, eta).is_zero()
    # fiber-dependent coefficient with the trivial connection
    conn0 = Connection.trivial(bc)
    eta = VValuedForm(bc, 1, 0, {
        (0,): MultiVector.from_scalar(ch.var("u") * ch.var("x1"))})
    assert prop_identity_residual(conn0, eta).is_zero()


def test_foliated_d(prod_chart):
    bc = BundleChart(prod_chart)
    ch = prod_chart
    conn0 = Connection.trivial(bc)
    f = ch.var("u") * ch.var("x1")
    from pcoupling.calculus import DiffForm
    beta = DiffForm(ch, 0, {(): f})
    db = foliated_d(conn0, beta)
    # only base differentials survive
    assert db.comps == {(0,): ch.var("x1")}
    assert foliated_d(conn0, db).is_zero()
    curved = Connection(bc, {(0, 0): ch.var("v")})
    assert not curvature(curved).is_zero()
    with pytest.raises(PreconditionError):
        foliated_d(curved, beta)


def test_foliated_d_squared_random(prod_chart):
    bc = BundleChart(prod_chart)
    ch = prod_chart
    conn0 = Connection.trivial(bc)
    rng = rng_for("dF")
    from pcoupling.calculus import DiffForm
    for _ in range(10):
        comps = {(0,): random_scalar(ch, rng), (1,): random_scalar(ch, rng)}
        beta = DiffForm(ch, 1, comps)
        assert foliated_d(conn0, foliated_d(conn0, beta)).is_zero()


def test_project_poisson(prod_chart):
    bc = BundleChart(prod_chart)
    la2 = open_book_on(prod_chart)
    fchart, ups = project_poisson(la2, bc)
    assert [s.name for s in fchart.specs] == ["x1", "x2", "x3"]
    assert ups.bivector.comps[(0, 1)] == fchart.var("x2")
    bad = prod_chart.var("u") * la2
    with pytest.raises(NotProjectableError):
        project_poisson(bad, bc)
    so3v = so3_on(prod_chart)
    _, ups2 = project_poisson(so3v, bc)
    assert ups2.verified


def open_book_on(chart):
    x2, x3 = chart.var("x2"), chart.var("x3")
    d = chart.dir_index
    i1 = d[chart.var_index["x1"]]
    i2 = d[chart.var_index["x2"]]
    i3 = d[chart.var_index["x3"]]
    return MultiVector(chart, 2, {(i1, i2): x2, (i1, i3): x3})


def so3_on(chart):
    x1, x2, x3 = (chart.var(n) for n in ("x1", "x2", "x3"))
    d = chart.dir_index
    i1 = d[chart.var_index["x1"]]
    i2 = d[chart.var_index["x2"]]
    i3 = d[chart.var_index["x3"]]
    return MultiVector(chart, 2, {(i2, i3): x1, (i1, i3): -x2, (i1, i2): x3})
