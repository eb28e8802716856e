import pytest

from triangular_ga import (
    MPoly,
    TriangularDerivation,
    TwinDerivation,
    apply_derivation,
    basic_invariants,
    delta,
    dixmier,
    exp_flow,
    fpf_check,
    fpf_oracle,
    parse_poly,
    reconstruct,
    verify_slice,
)
from triangular_ga.errors import NotASliceError, VariableError
from triangular_ga.lnd import iterate

import _gen

V = ("y", "z", "u")
TW = ("y", "zp", "zm")


def P(text, variables=V):
    return parse_poly(text, variables)


def test_delta3_conjugate_image():
    assert apply_derivation(delta(3), P("u - x*y*z")) == P("1 - 2*x*y^2")


def test_delta4_slice():
    assert apply_derivation(delta(4), P("u - x^2*y*z + 2/3*y^3")) == 1


def test_constants_are_killed():
    assert not apply_derivation(delta(2), P("7 + x"))


def test_foreign_variable():
    with pytest.raises(VariableError):
        apply_derivation(delta(2), parse_poly("w", ("w",)))


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_delta_flow(r):
    F = exp_flow(delta(r))
    W = V + ("t",)
    assert F.images["y"] == P("y + x^2*t", W)
    assert F.images["z"] == P("z + 2*y*t + x^2*t^2", W)
    # third coordinate: the cubic term carries x^(r+2)
    assert F.images["u"] == P(f"u + (1 + x^{r}*z)*t + x^{r}*y*t^2 + 1/3*x^{r + 2}*t^3", W)


def test_flow_at_zero_is_identity():
    F = exp_flow(delta(2)).at(0)
    for v, img in F.images.items():
        assert img == MPoly.var(v, img.vars)


def _flow_s(F):
    return {v: img.rename({"t": "s"}) for v, img in F.images.items()}


def test_flow_group_law_and_homomorphism():
    r = _gen.rng(31)
    for _ in range(30):
        d = _gen.triangular(r, deg=2)
        F = exp_flow(d)
        W = d.vars + ("s", "t")
        Ft = {v: img.with_vars(W) for v, img in F.images.items()}
        Fs = {v: img.with_vars(W) for v, img in _flow_s(F).items()}
        lhs = {v: Fs[v].subs(Ft).with_vars(W) for v in d.vars}
        rhs = {v: Ft[v].subs({"t": P("s + t", W)}).with_vars(W) for v in d.vars}
        assert lhs == rhs
        f, g = _gen.poly3(r, deg=1), _gen.poly3(r, deg=1)
        assert F.apply(f * g) == F.apply(f) * F.apply(g)
        # derivative of the flow at t = 0 is d
        df = F.apply(f).diff("t").subs({"t": MPoly.const(0, ())}).with_vars(d.vars)
        assert df == apply_derivation(d, f)


def test_fpf_examples():
    for r in range(1, 6):
        assert fpf_check(delta(r))
    assert not fpf_check(TriangularDerivation(1, 0, 0))
    assert not fpf_check(TwinDerivation(1, "2*y", "3*y^2"))


def test_fpf_against_oracle():
    r = _gen.rng(32)
    for _ in range(40):
        d = _gen.triangular(r)
        assert bool(fpf_check(d)) == fpf_oracle(d)
        t = _gen.twin(r)
        assert bool(fpf_check(t)) == fpf_oracle(t)


def _translation_instance(r):
    """q with a nonzero constant residue, so easy_translation applies."""
    n = r.randint(1, 2)
    q = P(str(r.choice([1, 2, -3]))) + _gen.upoly(r, "y", 1, 0, 2, V).scale_x(1)
    return TriangularDerivation(n, q, _gen.poly3(r, ("y", "z"), 1, 2).with_vars(V))


def test_dixmier_idempotent_and_kernel():
    from triangular_ga import easy_translation
    r = _gen.rng(33)
    for _ in range(30):
        d = _translation_instance(r)
        cert = easy_translation(d)
        s = cert.s
        f = _gen.poly3(r, deg=1, terms=2)
        g = dixmier(d, s, f)
        assert not apply_derivation(d, g)
        assert dixmier(d, s, g) == g
        assert not dixmier(d, s, s)
        assert reconstruct(d, s, f) == f


def test_verify_slice_rejects():
    with pytest.raises(NotASliceError):
        verify_slice(delta(2), P("u"))


def test_basic_invariants():
    tw = TwinDerivation(2, "2*y", "1 - 2*y^2")
    phi_p, phi_m = basic_invariants(tw)
    assert phi_p == P("-x^2*zp + y^2", TW)
    assert not apply_derivation(delta(2), P("x^2*z - y^2"))


def test_iterate_nilpotent():
    assert not iterate(delta(2), P("u"), 6)
