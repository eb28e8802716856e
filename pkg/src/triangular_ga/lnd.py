"""Triangular and twin-triangular locally nilpotent derivations.

A triangular derivation is x^n d/dy + q(y) d/dz + p(y, z) d/du on A[y, z, u].
A twin derivation is x^n d/dy + p_plus(y) d/dzp + p_minus(y) d/dzm.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

from .errors import InternalConsistencyError, NotASliceError, PreconditionError, VariableError
from .ideals import resultant, squarefree_part, uni_divides, uni_gcd, unit_ideal
from .ring import BaseElem, MPoly, parse_poly

TRI_VARS = ("y", "z", "u")
TWIN_VARS = ("y", "zp", "zm")
FLOW_PARAM = "t"


def _as_poly(value, variables):
    if isinstance(value, MPoly):
        return value.with_vars(variables)
    if isinstance(value, str):
        return parse_poly(value, variables)
    return MPoly.const(value, variables)


class Derivation:
    """Common behaviour: a variable tuple and one image per variable."""

    vars: tuple
    n: int

    def images(self) -> dict:
        raise NotImplementedError

    def __call__(self, f):
        return apply_derivation(self, f)

    def __eq__(self, other):
        return type(self) is type(other) and self.vars == other.vars and self.images() == other.images()

    def __hash__(self):
        return hash((type(self).__name__, self.vars, self.n))


class TriangularDerivation(Derivation):
    """x^n d/dy + q d/dz + p d/du with q in A[y] and p in A[y, z]."""

    def __init__(self, n: int, q, p, trail=(), variables=TRI_VARS):
        if int(n) != n or n < 0:
            raise ValueError("n must be a non-negative integer")
        self.n = int(n)
        self.vars = tuple(variables)
        y, z, u = self.vars
        self.q = _as_poly(q, self.vars)
        self.p = _as_poly(p, self.vars)
        if not self.q.free_of(z, u):
            raise VariableError(f"q = {self.q} must depend on {y} only")
        if not self.p.free_of(u):
            raise VariableError(f"p = {self.p} must not involve {u}")
        self.trail = tuple(trail)

    def images(self):
        y, z, u = self.vars
        return {y: MPoly.const(BaseElem.x(self.n), self.vars), z: self.q, u: self.p}

    @property
    def ell(self) -> int:
        """z-degree of p (-1 when p = 0)."""
        return self.p.degree(self.vars[1])

    def p_coeff(self, r) -> MPoly:
        return self.p.coeff(self.vars[1], r)

    def with_trail(self, *steps):
        return TriangularDerivation(self.n, self.q, self.p, self.trail + steps, self.vars)

    def __repr__(self):
        return f"TriangularDerivation(n={self.n}, q={str(self.q)!r}, p={str(self.p)!r})"


class TwinDerivation(Derivation):
    """x^n d/dy + p_plus(y) d/dzp + p_minus(y) d/dzm."""

    def __init__(self, n: int, p_plus, p_minus, trail=(), variables=TWIN_VARS):
        if int(n) != n or n < 0:
            raise ValueError("n must be a non-negative integer")
        self.n = int(n)
        self.vars = tuple(variables)
        y, zp, zm = self.vars
        self.p_plus = _as_poly(p_plus, self.vars)
        self.p_minus = _as_poly(p_minus, self.vars)
        for name, p in (("p_plus", self.p_plus), ("p_minus", self.p_minus)):
            if not p.free_of(zp, zm):
                raise VariableError(f"{name} = {p} must depend on {y} only")
        self.trail = tuple(trail)

    def images(self):
        y, zp, zm = self.vars
        return {y: MPoly.const(BaseElem.x(self.n), self.vars), zp: self.p_plus, zm: self.p_minus}

    def with_trail(self, *steps):
        return TwinDerivation(self.n, self.p_plus, self.p_minus, self.trail + steps, self.vars)

    def swapped(self):
        y, zp, zm = self.vars
        return TwinDerivation(self.n, self.p_minus, self.p_plus, self.trail, self.vars)

    def __repr__(self):
        return f"TwinDerivation(n={self.n}, p_plus={str(self.p_plus)!r}, p_minus={str(self.p_minus)!r})"


def apply_derivation(d: Derivation, f: MPoly) -> MPoly:
    """Leibniz extension of the generator images."""
    extra = [v for v in f.used_vars() if v not in d.vars]
    if extra:
        raise VariableError(f"{f} involves {extra}, not in the derivation variables {d.vars}")
    f = f.with_vars(d.vars)
    out = MPoly(d.vars)
    for v, img in d.images().items():
        if f.degree(v) > 0 and img:
            out = out + img * f.diff(v)
    return out


def iterate(d: Derivation, f: MPoly, k: int) -> MPoly:
    for _ in range(k):
        f = apply_derivation(d, f)
    return f


def nilpotency_index(d: Derivation, f: MPoly, bound=200) -> int:
    """Smallest k with d^k(f) = 0."""
    k = 0
    while f:
        if k > bound:
            raise PreconditionError("derivation is not locally nilpotent on this element")
        f = apply_derivation(d, f)
        k += 1
    return k


# ---------------------------------------------------------------------------
# exponential flow


@dataclass(frozen=True)
class FlowMap:
    """Coordinate images of exp(t*d), polynomials in (vars..., t)."""

    images: dict
    param: str = FLOW_PARAM

    def apply(self, f: MPoly) -> MPoly:
        return f.subs({v: img for v, img in self.images.items() if v in f.vars})

    def at(self, value) -> "FlowMap":
        """Specialize the flow parameter to a constant or polynomial."""
        return FlowMap({v: img.subs({self.param: value}) for v, img in self.images.items()}, self.param)

    def then(self, other: "FlowMap") -> "FlowMap":
        """The ring map f -> self.apply(other.apply(f))."""
        return FlowMap({v: self.apply(img) for v, img in other.images.items()}, self.param)

    def __str__(self):
        return "(" + ", ".join(str(img) for img in self.images.values()) + ")"


def exp_flow(d: Derivation, param=FLOW_PARAM) -> FlowMap:
    """exp(t*d) on each coordinate, summed until the iterate vanishes."""
    if param in d.vars:
        raise VariableError(f"flow parameter {param!r} clashes with a coordinate")
    variables = d.vars + (param,)
    t = MPoly.var(param, variables)
    images = {}
    for v in d.vars:
        term = MPoly.var(v, d.vars)
        total = MPoly(variables)
        k = 0
        while term:
            total = total + term.with_vars(variables) * (t ** k) * Fraction(1, factorial(k))
            term = apply_derivation(d, term)
            k += 1
        images[v] = total
    return FlowMap(images, param)


# ---------------------------------------------------------------------------
# fixed-point freeness


@dataclass(frozen=True)
class FPFResult:
    value: bool
    reason: str
    witness: object = None

    def __bool__(self):
        return self.value


def fpf_check(d: Derivation) -> FPFResult:
    """Whether (x^n, images) is the unit ideal, decided on residues mod x."""
    if d.n == 0:
        return FPFResult(True, "n = 0: the image of y is a unit")
    if isinstance(d, TwinDerivation):
        a, b = d.p_plus.residue(), d.p_minus.residue()
        y = d.vars[0]
        if not a and not b:
            return FPFResult(False, "both residues vanish", MPoly(d.vars))
        g = uni_gcd(a, b, var=y)
        if g.is_constant():
            return FPFResult(True, "residues of p_plus and p_minus are coprime", g)
        return FPFResult(False, f"common factor {g} of the residues", g)
    y, z, _ = d.vars
    qb, pb = d.q.residue(), d.p.residue()
    if not qb:
        if pb.is_constant() and pb:
            return FPFResult(True, "q vanishes mod x and p is a nonzero constant mod x")
        return FPFResult(False, f"q vanishes mod x and p mod x = {pb} has zeros", pb)
    sq = squarefree_part(qb, var=y)
    for r, pr in pb.coefficients(z).items():
        if r >= 1 and not uni_divides(sq, pr, var=y):
            return FPFResult(False, f"radical of q mod x does not divide the z^{r} coefficient of p mod x", r)
    p0 = pb.coeff(z, 0)
    g = uni_gcd(qb, p0, var=y)
    if not g.is_constant():
        return FPFResult(False, f"q and p_0 share the factor {g} mod x", g)
    return FPFResult(True, "q mod x and p mod x have no common zero")


def fpf_oracle(d: Derivation) -> bool:
    """Independent decision of fixed-point freeness via resultants and Groebner bases."""
    if d.n == 0:
        return True
    y = d.vars[0]
    if isinstance(d, TwinDerivation):
        a, b = d.p_plus.residue(), d.p_minus.residue()
        if not a or not b:
            other = a or b
            return bool(other) and other.is_constant()
        return bool(resultant(a, b, y))
    z = d.vars[1]
    qb, pb = d.q.residue(), d.p.residue()
    if qb:
        if pb:
            res = resultant(qb, pb, y)
            by_resultant = bool(res) and res.is_constant()
        else:
            by_resultant = qb.is_constant()
        by_groebner = unit_ideal([qb, pb])
        if by_resultant != by_groebner:
            raise InternalConsistencyError("resultant and Groebner oracles disagree")
        return by_resultant
    return unit_ideal([pb]) if pb else False


# ---------------------------------------------------------------------------
# slices and the Dixmier retraction


@dataclass(frozen=True)
class SliceCertificate:
    """A slice s (d s = 1) and the quotient invariant.

    Kernel generators are the Dixmier projections of the coordinates; they are
    computed on first use since s can be large.
    """

    derivation: Derivation
    s: MPoly
    invariant: MPoly | None = None
    to_original: dict | None = None
    notes: tuple = field(default_factory=tuple)

    def check(self) -> bool:
        return apply_derivation(self.derivation, self.s) == 1

    @property
    def kernel_generators(self) -> tuple:
        cached = self.__dict__.get("_kernel")
        if cached is None:
            d = self.derivation
            cached = tuple(dixmier(d, self.s, MPoly.var(v, d.vars)) for v in d.vars)
            object.__setattr__(self, "_kernel", cached)
        return cached


def dixmier(d: Derivation, s: MPoly, f: MPoly) -> MPoly:
    """Projection onto the kernel along the slice s: sum (-s)^k d^k(f) / k!."""
    out = MPoly(d.vars)
    term = f.with_vars(d.vars)
    minus_s = -s.with_vars(d.vars)
    k = 0
    power = MPoly.const(1, d.vars)
    while term:
        out = out + power * term * Fraction(1, factorial(k))
        term = apply_derivation(d, term)
        power = power * minus_s
        k += 1
    return out


def reconstruct(d: Derivation, s: MPoly, f: MPoly) -> MPoly:
    """Write f as sum s^k * dixmier(d^k f) / k!, which must give back f."""
    out = MPoly(d.vars)
    term = f.with_vars(d.vars)
    s = s.with_vars(d.vars)
    k = 0
    while term:
        out = out + (s ** k) * dixmier(d, s, term) * Fraction(1, factorial(k))
        term = apply_derivation(d, term)
        k += 1
    return out


def verify_slice(d: Derivation, s: MPoly, invariant=None, to_original=None) -> SliceCertificate:
    image = apply_derivation(d, s)
    if image != 1:
        raise NotASliceError(image)
    return SliceCertificate(d, s.with_vars(d.vars), invariant, to_original)


# ---------------------------------------------------------------------------


def integral(p: MPoly, var) -> MPoly:
    """Integral from 0 in var."""
    if var not in p.vars:
        p = p.with_vars(p.vars + (var,))
    return p.integrate(var)


def basic_invariants(d: Derivation) -> list:
    """x^n z - Q(y) for triangular d; -x^n z_pm + P_pm(y) for twin d."""
    xn = BaseElem.x(d.n)
    y = d.vars[0]
    if isinstance(d, TwinDerivation):
        _, zp, zm = d.vars
        out = [
            -MPoly.var(zp, d.vars) * xn + integral(d.p_plus, y),
            -MPoly.var(zm, d.vars) * xn + integral(d.p_minus, y),
        ]
    else:
        z = d.vars[1]
        out = [MPoly.var(z, d.vars) * xn - integral(d.q, y)]
    for v in out:
        if apply_derivation(d, v):
            raise InternalConsistencyError(f"{v} is not an invariant")
    return out
