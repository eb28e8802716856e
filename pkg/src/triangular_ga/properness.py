"""Non-properness certificates from the integrals Gamma_r.

For d = x^n d/dy + q d/dz + p d/du with p = sum p_r z^r, the orbit closure of
the slice {z = 0} meets the boundary of P^1 x A^3 x A^3 in a scheme Z whose
coordinate ring is A[y1, y2]/(x^n, R, Theta_l)[z2, u1, u2]. When Gamma_l is
not in (x^n, Q(y2) - Q(y1)) and Z is nonempty, the action is not proper.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InternalConsistencyError, InternalError, PreconditionError, DivisibilityError
from .ideals import GroebnerBasis, MembershipWitness, groebner, layered_membership
from .lnd import TriangularDerivation, integral
from .reduction import DecomposeResult, sharp_decompose
from .ring import BaseElem, MPoly

PAIR = ("y1", "y2")
W_VARS = ("y1", "y2", "z1", "z2", "u1", "u2", "w0", "w1")


def _at(f: MPoly, var, value: MPoly) -> MPoly:
    return f.subs({var: value}) if var in f.vars else f.with_vars(f.vars)


def _two_copies(f: MPoly, var="y"):
    """f(y1) and f(y2) on the variable pair (y1, y2)."""
    y1, y2 = MPoly.gens(PAIR)
    return _at(f, var, y1).with_vars(PAIR), _at(f, var, y2).with_vars(PAIR)


def _divide_by_difference(f: MPoly, k: int) -> MPoly:
    diff = MPoly.parse("y2 - y1", PAIR)
    for _ in range(k):
        try:
            f = f.exact_div(diff)
        except DivisibilityError as exc:
            raise InternalError(f"(y2 - y1) does not divide {f}") from exc
    return f


def gamma_poly(p_r: MPoly, q: MPoly, r: int, var="y"):
    """(Gamma_r, Theta_r) with Gamma_r the integral of p_r (Q - Q(y1))^r from y1 to y2."""
    p_r = p_r.with_vars((var,))
    q = q.with_vars((var,))
    Q = integral(q, var)
    loc = ("xi", "y1")
    xi = MPoly.var("xi", loc)
    Qxi = Q.subs({var: xi}).with_vars(loc)
    Qy1 = Q.subs({var: MPoly.var("y1", loc)}).with_vars(loc)
    integrand = p_r.subs({var: xi}).with_vars(loc) * (Qxi - Qy1) ** r
    anti = integrand.integrate("xi")
    y1, y2 = MPoly.gens(PAIR)
    gamma = anti.subs({"xi": y2}).with_vars(PAIR) - anti.subs({"xi": y1}).with_vars(PAIR)
    theta = _divide_by_difference(gamma, r + 1)
    return gamma, theta


def difference_quotient(Q: MPoly, var="y") -> MPoly:
    """R = (Q(y2) - Q(y1)) / (y2 - y1)."""
    a, b = _two_copies(Q, var)
    return _divide_by_difference(b - a, 1)


def e_sequence(p: MPoly, q: MPoly, count: int, var="y"):
    """E_1 = integral of p, E_{k+1} = integral of E_k q; returns [E_1, ..., E_count]."""
    out = [integral(p, var)]
    while len(out) < count:
        out.append(integral(out[-1] * q, var))
    return out


@dataclass
class GammaMembership:
    member: bool
    layered: MembershipWitness
    decomposition: DecomposeResult

    def __bool__(self):
        return self.member


def gamma_membership(p_l: MPoly, q: MPoly, n: int, ell: int, var="y") -> GammaMembership:
    """Decide p_l = q f(Q) + x^n g by two independent routes that must agree.

    Route one tests E_{l+1}(y2) - E_{l+1}(y1) in (x^n, Q(y2) - Q(y1)); route
    two runs the greedy decomposition.
    """
    if q.residue().degree(var) < 1:
        raise PreconditionError("residue of q must be nonconstant")
    p_l, q = p_l.with_vars((var,)), q.with_vars((var,))
    E = e_sequence(p_l, q, ell + 1, var)[-1]
    a, b = _two_copies(E, var)
    Qa, Qb = _two_copies(integral(q, var), var)
    layered = layered_membership(b - a, Qb - Qa, n)
    dec = sharp_decompose(p_l, q, n, var)
    if layered.member != bool(dec):
        raise InternalConsistencyError(
            f"membership routes disagree: layered={layered.member}, decomposition={bool(dec)}"
        )
    return GammaMembership(layered.member, layered, dec)


@dataclass
class GammaCertificate:
    """Replayable evidence that the action is not proper."""

    n: int
    q: MPoly
    p: MPoly
    ell: int
    p_ell: MPoly
    gamma: MPoly
    theta: MPoly
    R: MPoly
    R_residue: MPoly
    theta_residue: MPoly
    z_basis: GroebnerBasis
    gamma_refusal: MembershipWitness
    decomposition: DecomposeResult
    layer_basis: GroebnerBasis | None = None
    w_equations: list = field(default_factory=list)
    image_equations: list = field(default_factory=list)

    def to_json(self):
        return {
            "kind": "GammaCertificate",
            "n": self.n,
            "q": str(self.q),
            "p": str(self.p),
            "ell": self.ell,
            "p_ell": str(self.p_ell),
            "gamma": str(self.gamma),
            "theta": str(self.theta),
            "R": str(self.R),
            "R_residue": str(self.R_residue),
            "theta_residue": str(self.theta_residue),
            "z_groebner_basis": [str(g) for g in self.z_basis.generators],
            "z_nonempty": not self.z_basis.is_unit(),
            "gamma_refusal": self.gamma_refusal.refusal,
            "decompose_refusal": self.decomposition.reason,
            "layer_groebner_basis": None if self.layer_basis is None else [str(g) for g in self.layer_basis.generators],
            "w_equations": [str(e) for e in self.w_equations],
            "image_equations": list(self.image_equations),
        }


def _w_equations(n, Q, thetas, R, ell):
    V = W_VARS
    y1, y2, z1, z2, u1, u2, w0, w1 = MPoly.gens(V)
    xn = BaseElem.x(n)
    e1 = (y2 - y1) * w1 - w0 * xn
    e2 = w1 * z2 - R.with_vars(V) * w0
    e3 = w1 ** (ell + 1) * (u2 - u1)
    for r, th in enumerate(thetas):
        e3 = e3 - th.with_vars(V) * w0 ** (r + 1) * w1 ** (ell - r)
    return [z1, e1, e2, e3]


def non_properness_certificate(d: TriangularDerivation, ell: int, p_ell: MPoly) -> GammaCertificate:
    """Assemble and verify the certificate for a refused top coefficient."""
    y, z, _ = d.vars
    q = d.q.with_vars((y,))
    p_ell = p_ell.with_vars((y,))
    gm = gamma_membership(p_ell, q, d.n, ell, y)
    if gm.member:
        raise PreconditionError("p_l decomposes: the Gamma criterion does not apply")
    gamma, theta = gamma_poly(p_ell, q, ell, y)
    # Gamma_l itself must not lie in (x^n, Q(y2) - Q(y1))
    Qa, Qb = _two_copies(integral(q, y), y)
    refusal = layered_membership(gamma, Qb - Qa, d.n)
    if refusal.member:
        raise InternalConsistencyError("Gamma_l lies in (x^n, Q(y2) - Q(y1)) although p_l does not decompose")
    R = difference_quotient(integral(q, y), y)
    Rb, Tb = R.residue(), theta.residue()
    zb = groebner([g for g in (Rb, Tb) if g], variables=PAIR)
    if zb.is_unit():
        raise InternalConsistencyError("Z is empty: (R, Theta) is the unit ideal mod x")
    layer = None
    if R.is_x_polynomial() and theta.is_x_polynomial():
        layer = groebner([MPoly.const(BaseElem.x(d.n), PAIR), R, theta])
        if layer.is_unit():
            raise InternalConsistencyError("(x^n, R, Theta) is the unit ideal")
    thetas = [gamma_poly(d.p_coeff(r).with_vars((y,)), q, r, y)[1] for r in range(ell + 1)]
    Q = integral(q, y)
    images = [
        f"y2 = y1 + x^{d.n}*t",
        "z1 = 0",
        f"z2 = ({R})*t",
        "u2 = u1 + " + " + ".join(f"({th})*t^{r + 1}" for r, th in enumerate(thetas)),
    ]
    return GammaCertificate(
        d.n, q, d.p, ell, p_ell, gamma, theta, R, Rb, Tb, zb, refusal, gm.decomposition,
        layer, _w_equations(d.n, Q, thetas, R, ell), images,
    )


def replay_gamma_certificate(cert: dict) -> bool:
    """Re-check a serialized certificate from its defining data, without search."""
    variables = ("y", "z", "u")
    q = MPoly.parse(cert["q"], variables)
    p_ell = MPoly.parse(cert["p_ell"], variables)
    n, ell = int(cert["n"]), int(cert["ell"])
    gamma, theta = gamma_poly(p_ell, q, ell)
    if str(gamma) != cert["gamma"] or str(theta) != cert["theta"]:
        return False
    Qa, Qb = _two_copies(integral(q.with_vars(("y",)), "y"))
    if layered_membership(gamma, Qb - Qa, n).member:
        return False
    R = difference_quotient(integral(q.with_vars(("y",)), "y"))
    zb = groebner([g for g in (R.residue(), theta.residue()) if g], variables=PAIR)
    return not zb.is_unit() and [str(g) for g in zb.generators] == cert["z_groebner_basis"]
