"""Polynomials over Q[x]_(x), residues, resultants and Groebner bases."""

from triangular_ga import BaseElem, parse_poly
from triangular_ga.ideals import groebner, resultant

V = ("y", "z")

a = BaseElem.poly([1, 1]) / BaseElem.poly([2, 1])
print("unit in the base ring:", a, "inverse:", a.inverse())

f = parse_poly("x*y^2 + (1 + x)*z - 3", V)
print("f =", f)
print("residue mod x:", f.residue())
print("x-order of x^2*y + x^3:", parse_poly("x^2*y + x^3", V).x_order())

g, h = parse_poly("y^2 - 2", V), parse_poly("y - z", V)
print("res_y(y^2 - 2, y - z) =", resultant(g, h, "y"))
G = groebner([parse_poly("y^2 - z", V), parse_poly("y*z - 1", V)])
print("Groebner basis of (y^2 - z, y*z - 1):", [str(p) for p in G.generators])
