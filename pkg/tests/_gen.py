"""Seeded random instances for the property suites."""

import random
from fractions import Fraction

from triangular_ga import MPoly, TriangularDerivation, TwinDerivation

SMALL = [Fraction(v) for v in (-3, -2, -1, 1, 2, 3)] + [Fraction(1, 2), Fraction(-1, 3)]


def rng(seed):
    return random.Random(seed)


def coeff_text(r, xdeg=1):
    c = r.choice(SMALL)
    k = r.randint(0, xdeg)
    return f"({c})" + (f"*x^{k}" if k else "")


def upoly(r, var="y", deg=3, xdeg=1, terms=3, variables=("y",), nonzero=True):
    parts = [f"{coeff_text(r, xdeg)}*{var}^{r.randint(0, deg)}" for _ in range(r.randint(1, terms))]
    p = MPoly.parse(" + ".join(parts), variables)
    if nonzero and not p:
        return upoly(r, var, deg, xdeg, terms, variables)
    return p


def residue_poly(r, deg=3, variables=("y",)):
    return upoly(r, "y", deg, 0, 3, variables)


def triangular(r, n_max=3, deg=3):
    n = r.randint(1, n_max)
    q = upoly(r, "y", deg, 1, 3, ("y", "z", "u"))
    p = MPoly.parse(" + ".join(
        f"{coeff_text(r)}*y^{r.randint(0, 2)}*z^{r.randint(0, 2)}" for _ in range(r.randint(1, 3))
    ), ("y", "z", "u"))
    return TriangularDerivation(n, q, p)


def twin(r, n_max=3, deg=3):
    n = r.randint(1, n_max)
    return TwinDerivation(n, upoly(r, "y", deg, 1, 3, ("y", "zp", "zm")), upoly(r, "y", deg, 1, 3, ("y", "zp", "zm")))


def poly3(r, variables=("y", "z", "u"), deg=2, terms=3):
    parts = []
    for _ in range(r.randint(1, terms)):
        mono = "*".join(f"{v}^{r.randint(0, deg)}" for v in variables)
        parts.append(f"{coeff_text(r)}*{mono}")
    return MPoly.parse(" + ".join(parts), variables)
