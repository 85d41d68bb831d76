import random
from fractions import Fraction

import pytest

from pcoupling.ring import Chart


@pytest.fixture
def r3():
    return Chart.make(fiber=["x1", "x2", "x3"])


@pytest.fixture
def cyl():
    # cylinder base (t, phi periodic), so(1,1)-free fiber x1..x3
    return Chart.make(base=["t", "phi"], fiber=["x1", "x2", "x3"],
                      periodic=["phi"])


def random_scalar(chart, rng, deg=2, terms=3, allow_trig=True, nonzero=False):
    """Small random polynomial scalar (trig generators included by default)."""
    while True:
        out = chart.zero()
        for _ in range(rng.randint(1, terms)):
            e = [0] * chart.ngens
            for _ in range(rng.randint(0, deg)):
                g = rng.randrange(chart.ngens)
                if not allow_trig and chart.gen_group[g].startswith("trig"):
                    continue
                e[g] += 1
            # canonical sin power
            for si, ci in chart.sin_pairs:
                if e[si] > 1:
                    e[ci] += e[si] - 1
                    e[si] = 1
            c = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
            mono = chart.const(c)
            for g, k in enumerate(e):
                if not k:
                    continue
                name = chart.gens[g]
                if name.startswith("cos("):
                    f = chart.cos_(name[4:-1])
                elif name.startswith("sin("):
                    f = chart.sin_(name[4:-1])
                else:
                    f = chart.var(name)
                mono = mono * f ** k
            out = out + mono
        if not (nonzero and out.is_zero()):
            return out


def rng_for(name):
    return random.Random(name if isinstance(name, int) else hash(name) % 2**32)
