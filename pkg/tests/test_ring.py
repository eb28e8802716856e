from fractions import Fraction

import pytest
import sympy

from triangular_ga import BaseElem, MPoly, ParseError, comp_inverse_mod_xn, parse_poly
from triangular_ga.errors import DivisibilityError, VariableError

import _gen

Y = ("y",)


def elem(text):
    return parse_poly(text, ()).constant_term()


def test_x_order_and_residue():
    assert elem("x^2 + x^3").x_order() == 2
    assert elem("(2 + 3*x)/(1 + x)").residue() == 2
    assert elem("x^2*(1 + x)").exact_div(elem("x^2")) == elem("1 + x")


def test_units_and_inverse():
    u = elem("2 + x")
    assert u.is_unit()
    assert u * u.inverse() == 1
    with pytest.raises(DivisibilityError):
        elem("x").inverse()
    with pytest.raises(DivisibilityError):
        elem("x").exact_div(elem("x^2"))


def test_division_only_by_units():
    assert parse_poly("y/(1 + x)", Y) * elem("1 + x") == parse_poly("y", Y)
    with pytest.raises(ParseError):
        parse_poly("y/x", Y)


def test_calculus():
    y = MPoly.var("y", Y)
    assert (y * 2).integrate("y") == y * y
    assert (y * y).diff("y") == y * 2
    V = ("y", "z", "z1")
    f = parse_poly("1 + x^2*z", V)
    g = f.subs({"z": parse_poly("z1 + y^2", V)})
    assert g == parse_poly("1 + x^2*z1 + x^2*y^2", g.vars)


def test_truncate_and_residue():
    f = parse_poly("y + x*y^2 + x^2*y^3", Y)
    assert f.residue() == parse_poly("y", Y)
    assert f.truncate(2) == parse_poly("y + x*y^2", Y)


def test_comp_inverse():
    assert comp_inverse_mod_xn(parse_poly("2*y", Y), 3) == parse_poly("1/2*tau", ("tau",))
    Q = parse_poly("2*y + 1/2*x*y^2", Y)
    assert comp_inverse_mod_xn(Q, 1) == parse_poly("1/2*tau", ("tau",))
    G = comp_inverse_mod_xn(Q, 2)
    assert G == parse_poly("1/2*tau - 1/16*x*tau^2", G.vars)
    back = G.subs({"tau": Q}).with_vars(Y)
    assert (back - MPoly.var("y", Y)).x_order() >= 2


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_poly("2**y", Y)
    assert (info.value.line, info.value.column) == (1, 3)


def test_parse_rejects_unknown_variable():
    with pytest.raises((ParseError, VariableError)):
        parse_poly("w + 1", Y)


def test_print_parse_round_trip():
    r = _gen.rng(11)
    for _ in range(40):
        f = _gen.poly3(r)
        assert parse_poly(str(f), f.vars) == f


def _to_sympy(f):
    return sympy.sympify(str(f).replace("^", "**"))


def test_arithmetic_against_sympy():
    r = _gen.rng(12)
    for _ in range(30):
        f, g = _gen.poly3(r), _gen.poly3(r)
        assert sympy.expand(_to_sympy(f * g) - _to_sympy(f) * _to_sympy(g)) == 0
        assert sympy.expand(_to_sympy(f + g) - _to_sympy(f) - _to_sympy(g)) == 0
        assert sympy.expand(_to_sympy(f.diff("y")) - sympy.diff(_to_sympy(f), sympy.Symbol("y"))) == 0


def test_divmod_by_monic():
    r = _gen.rng(13)
    for _ in range(30):
        f = _gen.upoly(r, deg=4)
        g = MPoly.parse("y^2 + 3*y + x", Y)
        q, rem = f.divmod(g)
        assert q * g + rem == f
        assert rem.degree("y") < 2
