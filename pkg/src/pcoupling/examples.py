"""Built-in example tensors, generated from their closed-form expressions.

The two parametric families share one recipe: a vertical Lie-Poisson tensor P
on a 3-dimensional fiber, horizontal lifts hor_i = d/du^i + P#(d rho_i) for a
pair of scalar potentials rho = rho_1 du^1 + rho_2 du^2, and the coupling
factor 1/s with

    s = (Casimir part) - Delta,
    Delta = d(rho_2)/du^1 - d(rho_1)/du^2 + P(d rho_1, d rho_2),

so that Delta is exactly the Hamiltonian of the curvature and the structure
equations hold.  The Casimir part is 2(1 + c|x|^2) for the sphere-leaf family
and 2 for the cylinder family.
"""

from pcoupling.calculus import MultiVector, PoissonTensor, differential, sharp
from pcoupling.fibration import BundleChart, Connection
from pcoupling.ring import Chart


class Example:
    def __init__(self, name, chart, pi, bundle=None, notes=""):
        self.name = name
        self.chart = chart
        self.pi = pi                      # PoissonTensor (not yet verified)
        self.bundle = bundle              # BundleChart or None
        self.notes = notes


def la2_tensor(chart):
    """The open-book Lie-Poisson tensor d_1 ^ (x2 d_2 + x3 d_3)."""
    di = {n: chart.dir_index[chart.var_index[n]] for n in ("x1", "x2", "x3")}
    return MultiVector(chart, 2, {
        (di["x1"], di["x2"]): chart.var("x2"),
        (di["x1"], di["x3"]): chart.var("x3")})


def so3_tensor(chart):
    """The so(3)* Lie-Poisson tensor (cyclic x-gamma d_alpha ^ d_beta)."""
    di = {n: chart.dir_index[chart.var_index[n]] for n in ("x1", "x2", "x3")}
    return MultiVector(chart, 2, {
        (di["x2"], di["x3"]): chart.var("x1"),
        (di["x1"], di["x3"]): -chart.var("x2"),
        (di["x1"], di["x2"]): chart.var("x3")})


def _coupled_family(chart, base_names, vert, casimir_part, rho):
    bc = BundleChart(chart)
    u1, u2 = base_names
    r1 = chart.scalar(rho[0])
    r2 = chart.scalar(rho[1])
    delta = r2.derive(u1) - r1.derive(u2)
    x1 = sharp(vert, differential(r1))
    x2 = sharp(vert, differential(r2))
    # P(d r1, d r2) = <d r2, P# d r1>
    for (k,), c in x1.comps.items():
        d2 = r2.derive(chart.directions[k])
        if not d2.is_zero():
            delta = delta + c * d2
    s = casimir_part - delta
    conn = Connection(bc, {
        (0, bc.fiber_slot[k]): c for (k,), c in x1.comps.items()} | {
        (1, bc.fiber_slot[k]): c for (k,), c in x2.comps.items()})
    pi_mv = (chart.one() / s) * conn.hor(0).wedge(conn.hor(1)) + vert
    return pi_mv, bc, conn, s


def so3_leaf(rho=("0", "0")):
    """Sphere-leaf family on base (p,q), fiber so(3)*, free parameter c."""
    chart = Chart.make(base=["p", "q"], fiber=["x1", "x2", "x3"],
                       constants=["c"])
    vert = so3_tensor(chart)
    nx = (chart.var("x1") ** 2 + chart.var("x2") ** 2 + chart.var("x3") ** 2)
    cas = 2 * (1 + chart.var("c") * nx)
    pi_mv, bc, _, _ = _coupled_family(chart, ("p", "q"), vert, cas, rho)
    return Example("so3-leaf", chart, PoissonTensor(pi_mv), bc,
                   notes="isotropy so(3); coupling factor 1/(2(1+c|x|^2)-Delta)")


def cylinder(rho=("0", "0")):
    """Cylinder family: base (t, phi periodic), fiber open-book Lie-Poisson."""
    chart = Chart.make(base=["t", "phi"], fiber=["x1", "x2", "x3"],
                       periodic=["phi"])
    vert = la2_tensor(chart)
    cas = chart.const(2)
    pi_mv, bc, _, _ = _coupled_family(chart, ("t", "phi"), vert, cas, rho)
    return Example("cylinder", chart, PoissonTensor(pi_mv), bc,
                   notes="trig ring on phi; coupling factor 1/(2-Delta)")


def product_r2():
    """Trivial coupling: symplectic R^2 times the open-book fiber."""
    chart = Chart.make(base=["u", "v"], fiber=["x1", "x2", "x3"])
    bc = BundleChart(chart)
    du = chart.dir_index[chart.var_index["u"]]
    dv = chart.dir_index[chart.var_index["v"]]
    pi_mv = MultiVector(chart, 2, {(du, dv): chart.one()}) + la2_tensor(chart)
    return Example("product-r2", chart, PoissonTensor(pi_mv), bc)


def open_book():
    """The open-book Lie-Poisson structure on R^3 (no bundle structure)."""
    chart = Chart.make(fiber=["x1", "x2", "x3"])
    return Example("open-book", chart, PoissonTensor(la2_tensor(chart)))


def z_basis(chart):
    """The four Poisson fields generating H^1 of the open-book tensor."""
    di = {n: chart.dir_index[chart.var_index[n]] for n in ("x1", "x2", "x3")}
    x2, x3 = chart.var("x2"), chart.var("x3")
    z1 = MultiVector(chart, 1, {(di["x1"],): chart.one()})
    z2 = MultiVector(chart, 1, {(di["x2"],): x2, (di["x3"],): -x3})
    z3 = MultiVector(chart, 1, {(di["x2"],): x3})
    z4 = MultiVector(chart, 1, {(di["x3"],): x2})
    return z1, z2, z3, z4


NAMES = ("so3-leaf", "open-book", "cylinder", "product-r2")


def get(name, rho=None):
    if name == "so3-leaf":
        return so3_leaf(rho or ("0", "0"))
    if name == "cylinder":
        return cylinder(rho or ("0", "0"))
    if name == "product-r2":
        return product_r2()
    if name == "open-book":
        return open_book()
    raise KeyError(f"unknown example {name!r}")
