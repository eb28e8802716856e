from fractions import Fraction

import pytest

from triangular_ga import (
    MPoly,
    TwinDerivation,
    build_side,
    chart_cocycle,
    general_position,
    hensel_lift_sigmas,
    parse_poly,
    psi_affineness,
    s1_s2_factor,
    separatedness_check,
    splitting_build,
)
from triangular_ga.atlas import (
    RVARS,
    SplittingAlgebra,
    cocycle_from_values,
    eval_poly,
    replay_atlas_certificate,
    splitting_from_data,
)
from triangular_ga.errors import PreconditionError, UnsupportedSplittingError

import _gen

Y = ("y",)
T = ("t",)


def P(text, variables=Y):
    return parse_poly(text, variables)


def quad():
    return splitting_build(P("y^2"), P("t", T))


def test_splitting_quadratic():
    alg = quad()
    assert alg.modulus == parse_poly("s^2 - t", RVARS)
    assert [str(r) for r in alg.roots] == ["s", "-s"]
    assert [p for _, p in alg.galois] == [(0, 1), (1, 0)]
    assert alg.verify()


def test_splitting_linear():
    alg = splitting_build(P("y"), P("1", T))
    assert [str(r) for r in alg.roots] == ["t"]


def test_splitting_cubic_unsupported():
    with pytest.raises(UnsupportedSplittingError):
        splitting_build(P("y^3"), P("t", T))


def test_splitting_from_file_data():
    data = {"P": "y^2", "alpha": "t", "modulus": "s^2 - t", "roots": ["s", "-s"],
            "galois": [{"s": "s", "perm": [0, 1]}, {"s": "-s", "perm": [1, 0]}]}
    alg = splitting_from_data(data)
    assert alg.to_json() == quad().to_json()


def test_inverse_in_B():
    alg = quad()
    r = _gen.rng(61)
    for _ in range(30):
        a, b = r.choice(_gen.SMALL), r.choice(_gen.SMALL)
        # a + b s has norm a^2 - b^2 t, a unit only when a or b vanishes
        u = alg.elem(f"({b})*s")
        assert alg.inverse(u) * u == alg.one()
        assert not alg.is_unit(alg.elem(f"({a}) + ({b})*s"))


def test_hensel_example():
    alg = quad()
    at = hensel_lift_sigmas(P("y^2 + x*y"), alg, 2)
    assert [str(s) for s in at.sigmas] == ["s - 1/2*x", "-s - 1/2*x"]
    assert [str(l) for l in at.lambdas[0]] == ["-1/2", "-1/2"]
    S1, S2 = s1_s2_factor(P("y^2 + x*y"), at.sigmas, 2, alg)
    assert [str(c) for c in S1] == ["1"]
    assert [str(c) for c in S2] == ["-1/4", "0"]


def test_hensel_n1_no_iterations():
    at = hensel_lift_sigmas(P("y^2 + x*y"), quad(), 1)
    assert at.sigmas == quad().roots and at.lambdas == []


def test_exact_roots_give_zero_S2():
    alg = quad()
    at = hensel_lift_sigmas(P("y^2"), alg, 3)
    assert at.sigmas == alg.roots
    _, S2 = s1_s2_factor(P("y^2"), at.sigmas, 3, alg)
    assert all(not c for c in S2)


def test_lifting_and_factorization_properties():
    r = _gen.rng(62)
    for _ in range(30):
        b, c = r.choice(_gen.SMALL + [Fraction(0)]), r.choice(_gen.SMALL + [Fraction(0)])
        Pb = P(f"y^2 + ({b})*y + ({c})")
        alpha = P(f"t - ({c}) + ({b * b / 4})", T)
        alg = splitting_build(Pb, alpha)
        n = r.randint(1, 3)
        Pfull = Pb + _gen.upoly(r, "y", 3, 0, 2).scale_x(1)
        at = hensel_lift_sigmas(Pfull, alg, n)
        for s in at.sigmas:
            assert (eval_poly(Pfull, alg, s) - alg.t()).x_order() >= n
        for gi, (_, perm) in enumerate(alg.galois):
            assert [alg.act(gi, s) for s in at.sigmas] == [at.sigmas[perm[i]] for i in range(2)]
        s1_s2_factor(Pfull, at.sigmas, n, alg)  # re-expands or raises
        other = _gen.upoly(r, "y", 3, 1, 3)
        coc = chart_cocycle(at, other, n)
        for (g, h), e in coc.entries.items():
            assert e.numerator + coc.f(h, g).numerator == alg.zero()


def _pair(values, n, alg=None):
    alg = alg or quad()
    return cocycle_from_values([alg.elem(v) for v in values], n, alg)


def test_not_separated_example():
    # f = x^-1 * 2s(s^2 + 1)
    res = separatedness_check(_pair(["s^3 + s", "-s^3 - s"], 1))
    assert not res and str(res.non_unit_factor) == "t^2 + 2*t + 1"


def test_separated_example():
    c = _pair(["1/2*s", "-1/2*s"], 2)
    res = separatedness_check(c)
    assert res and res.pairs[(0, 1)]["m"] == 2 and res.pairs[(0, 1)]["norm"] == "-t"


def test_zero_cocycle_not_separated():
    assert not separatedness_check(_pair(["s", "s"], 1))


def test_no_pole_not_separated():
    assert not separatedness_check(_pair(["x*s", "-x*s"], 1))


def test_psi_two_charts():
    c = _pair(["1/2*s", "-1/2*s"], 1)
    node = psi_affineness([0, 1], c)
    assert node.pair == (0, 1) and node.m == 1
    assert node.thetas == {0: "0", 1: "s"}
    assert node.depth() == 1


def _trivial_algebra():
    return SplittingAlgebra(P("y"), P("1", T), parse_poly("s", RVARS), [parse_poly("t", RVARS)],
                            [(parse_poly("s", RVARS), (0,))])


def test_psi_three_charts():
    alg = _trivial_algebra()
    c = cocycle_from_values([alg.elem("0"), alg.elem("x"), alg.elem("1")], 2, alg)
    assert separatedness_check(c)
    node = psi_affineness([0, 1, 2], c)
    assert node.depth() == 2
    assert node.m == 2


def test_psi_guard():
    with pytest.raises(PreconditionError):
        psi_affineness([0, 1], _pair(["s^3 + s", "-s^3 - s"], 1))


def test_general_position_delta2_twin():
    d = TwinDerivation(2, "2*y", "1 - 2*y^2")
    new, gp = general_position(d)
    assert gp.shear == (1, 0) and gp.pre_shift is None
    assert gp.alpha_plus == P("t", T)
    assert gp.alpha_minus == P("t^2 - 1/2", T)
    assert gp.P_minus.with_vars(Y) == P("y^3 - 3/2*y")
    assert [s.kind for s in gp.steps] == ["Monicize"]


def test_general_position_unmonicized_alpha():
    from triangular_ga import minimal_polynomial_mod
    assert minimal_polynomial_mod(P("y - 2/3*y^3"), P("1 - 2*y^2")) == P("t^2 - 2/9", T)


def test_general_position_zero_residue_shift():
    d = TwinDerivation(1, "x*y", "1")
    new, gp = general_position(d)
    assert gp.pre_shift == "zp -> zp + zm"
    assert gp.steps[0].kind == "Shear"


def test_general_position_searches_shear():
    # 0 is a critical point of y^2 and lies in the fibre of y(y - 1)^2 over
    # its critical value 0, so the identity shear fails condition b)
    d = TwinDerivation(1, "2*y", "3*y^2 - 4*y + 1")
    new, gp = general_position(d)
    assert gp.shear != (1, 0)
    assert gp.tried > 1


def test_separatedness_invariant_under_rescaling():
    r = _gen.rng(63)
    alg = quad()
    at = hensel_lift_sigmas(P("y^2"), alg, 2)
    for _ in range(30):
        other = _gen.upoly(r, "y", 3, 1, 3)
        c = r.choice(_gen.SMALL)
        a = separatedness_check(chart_cocycle(at, other, 2))
        b = separatedness_check(chart_cocycle(at, other * c, 2))
        assert bool(a) == bool(b)
        assert {k: v["m"] for k, v in a.pairs.items()} == {k: v["m"] for k, v in b.pairs.items()}


def test_delta2_hypersurface():
    d = TwinDerivation(2, "2*y", "1 - 2*y^2")
    new, gp = general_position(d)
    side = build_side(new, gp, "+")
    assert [str(s) for s in side.atlas.sigmas] == ["s", "-s"]
    sep = side.separatedness
    assert not sep
    assert sep.vanishing_roots == [Fraction(3, 2)]
    assert str(sep.non_unit_factor) == "t^2 - 3*t + 9/4"
    cert = {"n": new.n, "p_plus": str(new.p_plus), "p_minus": str(new.p_minus), "side": "+",
            "pair": [0, 1], "non_unit_factor": str(sep.non_unit_factor)}
    assert replay_atlas_certificate(cert)
