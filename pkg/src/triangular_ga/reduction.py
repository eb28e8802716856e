"""Reductions that bring a triangular derivation to a slice, a twin form or a
non-properness trigger.

Every coordinate change is recorded as a ``NormalizationStep`` whose
``substitution`` writes the new coordinates as polynomials in the previous
ones, so slices can be pulled back to the input coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod

from .errors import (
    DegenerateError,
    InternalError,
    PreconditionError,
)
from .lnd import (
    SliceCertificate,
    TriangularDerivation,
    TwinDerivation,
    apply_derivation,
    fpf_check,
    integral,
    verify_slice,
)
from .ring import BaseElem, MPoly, comp_inverse_mod_xn

KINDS = ("Z1Change", "ModificationChain", "SharpReduction", "Shear", "Monicize", "Rename")


@dataclass(frozen=True)
class NormalizationStep:
    """One change of coordinates (or a quotient-preserving rewrite).

    ``substitution`` maps each new coordinate to a polynomial in the previous
    coordinates; ``inverse`` does the opposite. A ModificationChain step has
    neither: it only identifies the quotients of the two derivations.
    """

    kind: str
    data: dict = field(default_factory=dict)
    substitution: dict | None = None
    inverse: dict | None = None
    note: str = ""

    @property
    def is_isomorphism(self) -> bool:
        return self.substitution is not None

    def to_json(self):
        out = {"kind": self.kind, "note": self.note}
        out["data"] = {k: _jsonable(v) for k, v in self.data.items()}
        if self.substitution is not None:
            out["substitution"] = {k: str(v) for k, v in self.substitution.items()}
        if self.inverse is not None:
            out["inverse"] = {k: str(v) for k, v in self.inverse.items()}
        return out


def _jsonable(v):
    if isinstance(v, (int, str, bool)) or v is None:
        return v
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(w) for w in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(w) for k, w in v.items()}
    return str(v)


def pull_back(f: MPoly, steps) -> MPoly:
    """Rewrite f, given in the coordinates after ``steps``, in the original ones."""
    for step in reversed(list(steps)):
        if step.substitution is None:
            raise PreconditionError(f"{step.kind} step is not a coordinate change")
        f = f.subs({v: img for v, img in step.substitution.items() if v in f.vars})
    return f


def check_conjugation(old, new, substitution) -> bool:
    """old(phi(w)) == phi(new(w)) for every new coordinate w, phi = substitution."""
    phi = {w: substitution.get(w, MPoly.var(w, old.vars)) for w in new.vars}
    for w, img in new.images().items():
        lhs = apply_derivation(old, phi[w].with_vars(old.vars))
        rhs = img.subs({v: phi[v] for v in new.vars if v in img.vars})
        if lhs != rhs:
            return False
    return True


# ---------------------------------------------------------------------------
# slices when the residue of q is a nonzero constant


def constant_residue_slice_builder(n: int, q: MPoly, var_y="y", var_z="z", variables=None) -> MPoly:
    """Slice for x^n d/dvar_y + q d/dvar_z when q mod x is a nonzero constant.

    q may involve parameter variables killed by the derivation. With
    v = x^n var_z - Q, G the compositional inverse of Q mod x^n and
    F(tau) = G(-tau), the slice is (var_y - F(v)) / x^n.
    """
    variables = tuple(variables) if variables is not None else q.vars
    if var_z not in variables:
        variables = variables + (var_z,)
    if var_y not in variables:
        variables = (var_y,) + variables
    q = q.with_vars(variables)
    qb = q.residue()
    if not qb or not qb.is_constant():
        raise PreconditionError(f"residue of {q} is not a nonzero constant")
    if n == 0:
        return MPoly.var(var_y, variables)
    Q = q.integrate(var_y)
    xn = BaseElem.x(n)
    v = MPoly.var(var_z, variables) * xn - Q
    tau = "tau_"
    G = comp_inverse_mod_xn(Q, n, var=var_y, tau=tau)
    F = G.subs({tau: -v})
    num = MPoly.var(var_y, variables) - F
    try:
        s = num.exact_div_x(n).with_vars(variables)
    except Exception as exc:
        raise InternalError(f"y - F(v) is not divisible by x^{n}") from exc
    images = {var_y: MPoly.const(xn, variables), var_z: q}
    image = MPoly(variables)
    for w, img in images.items():
        image = image + img * s.diff(w)
    if image != 1:
        raise InternalError(f"constructed slice has image {image}")
    return s


def easy_translation(d: TriangularDerivation):
    """Slice certificate when n = 0 or q mod x is a nonzero constant, else None."""
    if not fpf_check(d):
        raise PreconditionError("derivation is not fixed point free")
    y, z, _ = d.vars
    if d.n == 0:
        return verify_slice(d, MPoly.var(y, d.vars))
    qb = d.q.residue()
    if qb and qb.is_constant():
        s = constant_residue_slice_builder(d.n, d.q, y, z, d.vars)
        return verify_slice(d, s, invariant=MPoly.var(z, d.vars) * BaseElem.x(d.n) - integral(d.q, y))
    return None


def rank_two_slice(d: TriangularDerivation) -> SliceCertificate:
    """Slice when d z = 0: the pair (y, u) over the base A[z]."""
    y, z, u = d.vars
    if d.q:
        raise PreconditionError("q must vanish for the rank-two construction")
    s = constant_residue_slice_builder(d.n, d.p, y, u, d.vars)
    return verify_slice(d, s)


# ---------------------------------------------------------------------------
# reducible q


def reducible_q_normalize(d: TriangularDerivation):
    """Handle q = x^mu q0 with mu > 0.

    mu >= n: the change z1 = z - x^(mu-n) Q0(y) kills d z1; the result is a
    derivation with q = 0 (z now meaning z1). mu < n: returns
    x^(n-mu) d/dy + q0 d/dz + p d/du, which has the same classification.
    Returns (derivation, step).
    """
    y, z, u = d.vars
    if d.n < 1:
        raise PreconditionError("n must be at least 1")
    if not d.q:
        raise DegenerateError("q = 0: the derivation is already a rank-two problem")
    if d.q.residue():
        raise PreconditionError("residue of q is nonzero")
    if not fpf_check(d):
        raise PreconditionError("derivation is not fixed point free")
    mu = d.q.x_order()
    q0 = d.q.exact_div_x(mu)
    Q0 = integral(q0, y)
    if mu >= d.n:
        shift = Q0 * BaseElem.x(mu - d.n)
        Z = MPoly.var(z, d.vars)
        fwd = {z: Z - shift}
        inv = {z: Z + shift}
        p_new = d.p.subs({z: Z + shift}).with_vars(d.vars)
        step = NormalizationStep(
            "Z1Change", {"mu": mu, "q0": q0, "z1": fwd[z]}, fwd, inv,
            f"z1 = z - x^{mu - d.n}*Q0(y) is killed by the derivation",
        )
        new = TriangularDerivation(d.n, 0, p_new, d.trail + (step,), d.vars)
        return new, step
    step = NormalizationStep(
        "ModificationChain", {"mu": mu, "q0": q0, "n_before": d.n, "n_after": d.n - mu}, None, None,
        "classification equivalence: the two derivations have isomorphic quotients; not an isomorphism of total spaces",
    )
    new = TriangularDerivation(d.n - mu, q0, d.p, d.trail + (step,), d.vars)
    return new, step


# ---------------------------------------------------------------------------
# sharp reduction


@dataclass(frozen=True)
class DecomposeResult:
    """p_l = q f(Q) + x^n g exactly, or a refusal at some layer."""

    f: MPoly | None
    g: MPoly | None
    refused: bool = False
    layer: int | None = None
    reason: str = ""

    def __bool__(self):
        return not self.refused


def _solve_layer(h, qb, Qb, tau_vars, var):
    """phi in Q[tau] with h = qb * phi(Qb), or None. Degrees of qb*Qb^j are distinct."""
    d = qb.degree(var)
    e = Qb.degree(var)
    phi = MPoly(tau_vars)
    tau = MPoly.var(tau_vars[0], tau_vars)
    lq = qb.coeff(var, d).constant_term().constant()
    lQ = Qb.coeff(var, e).constant_term().constant()
    while h:
        deg = h.degree(var)
        if deg < d or (deg - d) % e:
            return None
        j = (deg - d) // e
        c = h.coeff(var, deg).constant_term().constant() / (lq * lQ ** j)
        phi = phi + tau ** j * c
        h = h - qb * Qb ** j * c
    return phi


def sharp_decompose(p_l: MPoly, q: MPoly, n: int, var="y") -> DecomposeResult:
    """Greedy x-adic search for p_l = q f(Q) + x^n g with Q the integral of q."""
    qb = q.residue()
    if qb.degree(var) < 1:
        raise PreconditionError("residue of q must be nonconstant")
    p_l, q = p_l._align(q)
    Q = integral(q, var)
    Qb = Q.residue()
    tau_vars = ("tau",)
    f = MPoly(tau_vars)
    rem = p_l
    for k in range(n):
        h = rem.residue()
        phi = _solve_layer(h, qb, Qb, tau_vars, var)
        if phi is None:
            return DecomposeResult(None, None, True, k, f"layer {k}: {h} is not of the form q*phi(Q) mod x")
        f = f + phi * BaseElem.x(k)
        rem = (rem - q * phi.subs({"tau": Q})).exact_div_x(1)
    g = rem
    check = q * f.subs({"tau": Q}) + g * BaseElem.x(n)
    if check != p_l:
        raise InternalError("decomposition does not re-expand")
    return DecomposeResult(f, g.with_vars(p_l.vars), False)


def sharp_change(d: TriangularDerivation, dec: DecomposeResult) -> MPoly:
    """The polynomial h with u~ = u - h lowering the z-degree of d u."""
    y, z, u = d.vars
    ell = d.ell
    Q = integral(d.q, y)
    G = integral(dec.g.with_vars(d.vars), y)
    Z = MPoly.var(z, d.vars)
    h = G * Z ** ell
    xn = BaseElem.x(d.n)
    fk = dec.f
    k = 0
    while fk:
        c = Fraction((-1) ** k, prod(ell + 1 + j for j in range(k + 1)))
        h = h + fk.subs({"tau": Q}).with_vars(d.vars) * (xn ** k) * (Z ** (ell + 1 + k)) * c
        fk = fk.diff("tau")
        k += 1
    return h


@dataclass(frozen=True)
class NonProperTrigger:
    """sharp_decompose refused on the top coefficient p_l of d."""

    derivation: TriangularDerivation
    ell: int
    p_ell: MPoly
    decomposition: DecomposeResult
    trail: tuple


@dataclass(frozen=True)
class SharpResult:
    twin: TwinDerivation
    derivation: TriangularDerivation
    trail: tuple


def to_twin(d: TriangularDerivation) -> tuple:
    """Rename (y, z, u) to (y, zp, zm) once p is free of z."""
    y, z, u = d.vars
    if d.ell > 0:
        raise PreconditionError("p still depends on z")
    twin_vars = ("y", "zp", "zm")
    ren = {y: "y", z: "zp", u: "zm"}
    sub = {"y": MPoly.var(y, d.vars), "zp": MPoly.var(z, d.vars), "zm": MPoly.var(u, d.vars)}
    inv = {y: MPoly.var("y", twin_vars), z: MPoly.var("zp", twin_vars), u: MPoly.var("zm", twin_vars)}
    step = NormalizationStep("Rename", {"map": ren}, sub, inv, "twin coordinates")
    twin = TwinDerivation(d.n, d.q.rename(ren), d.p.rename(ren), d.trail + (step,), twin_vars)
    return twin, step


def sharp_reduce(d: TriangularDerivation, max_steps=None):
    """Apply u~-changes until p is free of z (twin form) or decomposition refuses."""
    y, z, u = d.vars
    if d.q.residue().degree(y) < 1:
        raise PreconditionError("residue of q must be nonconstant")
    if not fpf_check(d):
        raise PreconditionError("derivation is not fixed point free")
    steps = []
    passes = 0
    while d.ell >= 1:
        if max_steps is not None and passes >= max_steps:
            raise PreconditionError(f"sharp reduction exceeded {max_steps} steps")
        ell = d.ell
        p_l = d.p_coeff(ell)
        dec = sharp_decompose(p_l, d.q, d.n, y)
        if not dec:
            return NonProperTrigger(d, ell, p_l, dec, d.trail)
        h = sharp_change(d, dec)
        U = MPoly.var(u, d.vars)
        new_p = apply_derivation(d, U - h)
        if new_p.degree(z) >= ell or not new_p.free_of(u):
            raise InternalError("u~-change failed to lower the z-degree")
        step = NormalizationStep(
            "SharpReduction",
            {"ell": ell, "f": dec.f, "g": dec.g, "G": integral(dec.g.with_vars(d.vars), y), "u_tilde": U - h},
            {u: U - h}, {u: U + h},
            f"u~ = u - ({h})",
        )
        d = TriangularDerivation(d.n, d.q, new_p, d.trail + (step,), d.vars)
        steps.append(step)
        passes += 1
    twin, rename = to_twin(d)
    return SharpResult(twin, d, d.trail)
