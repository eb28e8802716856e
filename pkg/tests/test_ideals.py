import random

import sympy

from triangular_ga import (
    MPoly,
    groebner,
    layered_membership,
    member,
    minimal_polynomial_mod,
    monitored_layered_membership,
    parse_poly,
    resultant,
    squarefree_part,
    uni_gcd,
    unit_ideal,
)

import _gen

Y = ("y",)
PAIR = ("y1", "y2")


def P(text, variables=Y):
    return parse_poly(text, variables)


def test_gcd_and_squarefree():
    assert uni_gcd(P("y^2 - 1"), P("y - 1")) == P("y - 1")
    assert squarefree_part(P("y^2")) == P("y")
    assert uni_gcd(P("2*y"), P("3*y^2 + 1")).is_constant()


def test_resultant_examples():
    V = ("y", "a", "b")
    assert resultant(P("y - a", V), P("y - b", V), "y") == P("a - b", V)
    assert not resultant(P("y^2 + y"), P("y^2 + y"), "y")
    V = ("s", "t")
    assert resultant(P("s^2 - t", V), P("s", V), "s") == P("-t", V)


def test_resultant_against_sympy():
    r = _gen.rng(21)
    y = sympy.Symbol("y")
    for _ in range(30):
        f, g = _gen.residue_poly(r), _gen.residue_poly(r)
        if f.degree("y") < 1 or g.degree("y") < 1:
            continue
        ours = sympy.Rational(resultant(f, g, "y").constant_term().constant())
        fs, gs = (sympy.Poly(sympy.sympify(str(h).replace("^", "**")), y) for h in (f, g))
        # sympy.resultant can differ in sign from the Sylvester determinant
        assert abs(ours) == abs(sympy.resultant(fs, gs))
        m, n = fs.degree(), gs.degree()
        rows = [[0] * i + fs.all_coeffs() + [0] * (n - 1 - i) for i in range(n)]
        rows += [[0] * i + gs.all_coeffs() + [0] * (m - 1 - i) for i in range(m)]
        assert ours == sympy.Matrix(rows).det()


def test_minimal_polynomials():
    assert minimal_polynomial_mod(P("y^2"), P("2*y")) == P("t", ("t",))
    assert minimal_polynomial_mod(P("y - 2/3*y^3"), P("1 - 2*y^2")) == P("t^2 - 2/9", ("t",))
    assert minimal_polynomial_mod(P("y"), P("3")) == 1


def test_unit_ideal_and_member():
    V = ("y", "z")
    assert unit_ideal([P("y", V), P("1 - y", V)])
    assert not unit_ideal([P("y", V), P("z", V)])
    w = member(P("y^2"), [P("y")])
    assert w.member and w.cofactors == [P("y")] and w.verify()


def _sympy_basis(gens, variables):
    syms = sympy.symbols(variables)
    exprs = [sympy.sympify(str(g).replace("^", "**")) for g in gens]
    G = sympy.groebner(exprs, *syms, order="grevlex")
    return sorted(sympy.srepr(sympy.expand(g)) for g in G.exprs)


def test_groebner_against_sympy():
    r = _gen.rng(22)
    V = ("y", "z")
    for _ in range(30):
        gens = [_gen.poly3(r, V, deg=2, terms=3).residue() or P("y", V) for _ in range(r.randint(2, 3))]
        ours = groebner(gens, variables=V)
        mine = sorted(sympy.srepr(sympy.expand(sympy.sympify(str(g).replace("^", "**")))) for g in ours.generators)
        assert mine == _sympy_basis(gens, V)


def test_groebner_canonical_under_permutation():
    r = _gen.rng(23)
    V = ("y", "z")
    for _ in range(30):
        gens = [_gen.poly3(r, V, deg=2).residue() or P("z", V) for _ in range(3)]
        shuffled = list(gens)
        random.Random(r.random()).shuffle(shuffled)
        assert groebner(gens, variables=V).generators == groebner(shuffled, variables=V).generators


def test_member_cofactors_verify():
    r = _gen.rng(24)
    V = ("y", "z")
    for _ in range(30):
        gens = [_gen.poly3(r, V, deg=2).residue() or P("y", V) for _ in range(2)]
        f = gens[0] * _gen.poly3(r, V).residue() + gens[1] * _gen.poly3(r, V).residue()
        w = member(f, gens)
        assert w.member and w.verify()


def test_layered_examples():
    H = P("y2^2 - y1^2", PAIR)
    f = H * parse_poly("x", PAIR) + parse_poly("7*x^2", PAIR)
    assert layered_membership(f, H, 2).member
    f = P("1/3*x*(y2 - y1)^2*(y2 + 2*y1)", PAIR)
    assert not layered_membership(f, H, 2).member


def test_layered_vs_groebner_monitor():
    r = _gen.rng(25)
    for _ in range(40):
        H = _gen.upoly(r, "y1", 2, 1, 2, PAIR) + P("y2^2", PAIR)
        n = r.randint(1, 3)
        if r.random() < 0.5:
            f = H * _gen.upoly(r, "y2", 2, 1, 2, PAIR) + _gen.upoly(r, "y1", 2, 0, 2, PAIR) * parse_poly(f"x^{n}", PAIR)
        else:
            f = _gen.upoly(r, "y2", 3, 2, 3, PAIR)
        w = monitored_layered_membership(f, H, n)
        if w.member:
            assert w.verify()
