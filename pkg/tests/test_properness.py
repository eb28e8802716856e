import json

import pytest
import sympy

from triangular_ga import delta, gamma_membership, gamma_poly, non_properness_certificate, parse_poly
from triangular_ga.errors import PreconditionError
from triangular_ga.properness import difference_quotient, e_sequence, replay_gamma_certificate

import _gen

Y = ("y",)
PAIR = ("y1", "y2")


def P(text, variables=Y):
    return parse_poly(text, variables)


def test_gamma_zero():
    g, th = gamma_poly(P("1"), P("2*y"), 0)
    assert g == P("y2 - y1", PAIR) and th == 1


def test_gamma_one_delta1():
    g, th = gamma_poly(P("x"), P("2*y"), 1)
    assert g == P("1/3*x*(y2 - y1)^2*(y2 + 2*y1)", PAIR)
    assert th == P("1/3*x*(y2 + 2*y1)", PAIR)


def test_gamma_against_sympy_integral():
    r = _gen.rng(51)
    xi, y1, y2, x = sympy.symbols("xi y1 y2 x")
    for _ in range(30):
        p = _gen.upoly(r, "y", 2, 1, 2)
        q = _gen.residue_poly(r, 2)
        k = r.randint(0, 2)
        g, _ = gamma_poly(p, q, k)
        ps = sympy.sympify(str(p).replace("^", "**")).subs("y", xi)
        Q = sympy.integrate(sympy.sympify(str(q).replace("^", "**")), (sympy.Symbol("y"), 0, sympy.Symbol("y")))
        integrand = ps * (Q.subs("y", xi) - Q.subs("y", y1)) ** k
        expected = sympy.integrate(integrand, (xi, y1, y2))
        assert sympy.expand(sympy.sympify(str(g).replace("^", "**")) - expected) == 0


def test_difference_quotient():
    assert difference_quotient(P("y^2")) == P("y1 + y2", PAIR)


def test_e_sequence_start():
    E = e_sequence(P("2*y"), P("2*y"), 2)
    assert E[0] == P("y^2") and E[1] == P("1/2*y^4")


def test_membership_examples():
    q = P("2*y")
    assert gamma_membership(q, q, 2, 1)
    assert not gamma_membership(P("x"), q, 2, 1)
    assert gamma_membership(P("x^2"), q, 2, 1)


def test_membership_routes_agree():
    r = _gen.rng(52)
    members = 0
    for _ in range(40):
        n = r.randint(1, 3)
        q = _gen.residue_poly(r, 2)
        if q.degree("y") < 1:
            q = q + P("y")
        ell = r.randint(1, 2)
        if r.random() < 0.5:
            p = q * r.choice([1, 2]) + _gen.upoly(r, "y", 2, 0, 2).scale_x(n)
        else:
            p = _gen.upoly(r, "y", 2, 1, 2)
        # raises InternalConsistencyError if the routes disagree
        members += bool(gamma_membership(p, q, n, ell))
    assert members > 0


def test_delta1_certificate():
    d = delta(1)
    cert = non_properness_certificate(d, 1, d.p_coeff(1))
    assert cert.R_residue == P("y1 + y2", PAIR)
    assert not cert.theta_residue
    assert not cert.z_basis.is_unit()
    doc = json.loads(json.dumps(cert.to_json()))
    assert replay_gamma_certificate(doc)


def test_tampered_certificate_fails_replay():
    d = delta(1)
    doc = non_properness_certificate(d, 1, d.p_coeff(1)).to_json()
    doc["gamma"] = "0"
    assert not replay_gamma_certificate(doc)


def test_certificate_guard():
    d = delta(2)
    with pytest.raises(PreconditionError):
        non_properness_certificate(d, 1, d.p_coeff(1))
