"""Quotient atlases for twin-triangular derivations.

Over U = Spec A[t]_alpha, the fibre P(y) - t of a branch polynomial splits in
B = kappa[t]_alpha[s]/(m(s)). Lifting the roots x-adically gives the charts
of the quotient, glued by the cocycle f_{g,g'}. Separatedness and affineness
are decided on that cocycle.

Elements of R~ = A (x) B are ``RElem``: a polynomial in (t, s) with
coefficients in A, reduced modulo m(s), divided by a power of alpha(t).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb, gcd

from .errors import (
    InternalConsistencyError,
    InternalError,
    NotInvertibleError,
    ParseError,
    PreconditionError,
    SchemaError,
    SearchBudgetError,
    UnsupportedSplittingError,
    VariableError,
)
from .ideals import minimal_polynomial_mod, resultant, uni_gcd
from . import _upoly as up
from .lnd import TwinDerivation, apply_derivation, fpf_check, integral
from .reduction import NormalizationStep
from .ring import BaseElem, MPoly, parse_poly

RVARS = ("t", "s")
LAM = "lam_"


def _s_first(e):
    return (e[1], e[0])


def _strip_alpha(N, alpha):
    """Split a univariate t-polynomial N into (alpha-part exponent, rest)."""
    a = alpha
    rest = N
    if up.degree(a) < 1:
        return 0, rest
    k = 0
    while rest:
        q, r = up.divmod_(rest, a)
        if r:
            break
        rest = q
        k += 1
    # also strip factors shared with alpha that are not full copies of it
    while rest:
        g = up.gcd(rest, a)
        if up.degree(g) < 1:
            break
        rest = up.divmod_(rest, g)[0]
    return k, rest


class SplittingAlgebra:
    """B = kappa[t]_alpha[s]/(m(s)) with the roots of P(y) - t listed.

    ``galois`` is a list of (image of s, permutation of root indices) with
    g(roots[i]) = roots[perm[i]].
    """

    def __init__(self, P_bar: MPoly, alpha: MPoly, modulus: MPoly, roots, galois, var="y"):
        self.var = var
        self.P_bar = P_bar.with_vars((var,))
        self.alpha = alpha.with_vars(("t",))
        self.alpha_r = self.alpha.with_vars(RVARS)
        self.modulus = modulus.with_vars(RVARS)
        if self.modulus.coeff("s", self.modulus.degree("s")) != 1:
            raise PreconditionError("modulus must be monic in s")
        if not self.modulus.is_residue():
            raise PreconditionError("modulus must have rational coefficients")
        self.rank = self.modulus.degree("s")
        self.roots = [self.elem(r) for r in roots]
        self.galois = [(MPoly.parse(g, RVARS) if isinstance(g, str) else g.with_vars(RVARS), tuple(p)) for g, p in galois]

    # elements ---------------------------------------------------------------
    def reduce(self, num: MPoly) -> MPoly:
        num = num.with_vars(RVARS)
        if num.degree("s") < self.rank:
            return num
        return num.divmod(self.modulus, _s_first)[1]

    def elem(self, value, k=0) -> "RElem":
        if isinstance(value, RElem):
            return value
        if isinstance(value, str):
            value = parse_poly(value, RVARS)
        if not isinstance(value, MPoly):
            value = MPoly.const(value, RVARS)
        return RElem(self, value, k)

    def zero(self):
        return RElem(self, MPoly(RVARS))

    def one(self):
        return self.elem(1)

    def t(self):
        return self.elem(MPoly.var("t", RVARS))

    # norms and units --------------------------------------------------------
    def norm(self, b: "RElem"):
        """Norm of a residue element as (numerator t-polynomial, alpha exponent)."""
        if not b.num.is_residue():
            raise PreconditionError("norm is only defined for elements of B")
        if not b.num:
            return up.ZERO, 0
        return resultant(self.modulus, b.num, "s").to_dense("t"), b.k * self.rank

    def unit_status(self, b: "RElem"):
        """(is_unit, non-unit factor as monic t-polynomial)."""
        N, _ = self.norm(b)
        if not N:
            return False, MPoly.const(0, ("t",))
        _, rest = _strip_alpha(N, self.alpha.to_dense("t"))
        return up.degree(rest) == 0, MPoly.from_dense(up.monic(rest), "t")

    def is_unit(self, b: "RElem") -> bool:
        return self.unit_status(b)[0]

    def _alpha_fraction(self, c):
        """1/c = h/alpha^j for a t-polynomial c dividing a power of alpha."""
        a = self.alpha.to_dense("t")
        power = up.ONE
        for j in range(up.degree(c) + 2):
            h, r = up.divmod_(power, c)
            if not r:
                return h, j
            power = up.mul(power, a)
        raise NotInvertibleError(f"{MPoly.from_dense(c, 't')} is not a unit of kappa[t]_alpha")

    def inverse(self, b: "RElem") -> "RElem":
        """Inverse of a unit of B by Cayley-Hamilton on the multiplication map."""
        if not b.num.is_residue():
            raise PreconditionError("inverse is only computed for elements of B")
        if not b.num:
            raise NotInvertibleError("zero is not invertible")
        V = RVARS + (LAM,)
        chi = resultant(self.modulus.with_vars(V), MPoly.var(LAM, V) - b.num.with_vars(V), "s")
        c0 = chi.coeff(LAM, 0).to_dense("t")
        if not c0:
            raise NotInvertibleError(f"{b} is a zero divisor in B")
        h, j = self._alpha_fraction(c0)
        # chi(lam) = lam * q(lam) + c0, so num^-1 = -q(num) / c0
        bn = RElem(self, b.num)
        acc = self.zero()
        for i in range(chi.degree(LAM), 0, -1):
            acc = acc * bn + RElem(self, chi.coeff(LAM, i).with_vars(RVARS))
        num = -acc.num * MPoly.from_dense(h, "t", RVARS) * (self.alpha_r ** b.k)
        result = RElem(self, num, j)
        if result * b != self.one():
            raise InternalError("Cayley-Hamilton inverse failed to verify")
        return result

    # Galois action ------------------------------------------------------------
    def act(self, g_index: int, b: "RElem") -> "RElem":
        img, _ = self.galois[g_index]
        return RElem(self, b.num.subs({"s": img}).with_vars(RVARS), b.k)

    # verification -------------------------------------------------------------
    def product_of_roots(self, roots=None) -> list:
        roots = self.roots if roots is None else roots
        prod_ = [self.one()]
        for r in roots:
            # multiply by (y - r)
            new = [self.zero()] * (len(prod_) + 1)
            for i, c in enumerate(prod_):
                new[i + 1] = new[i + 1] + c
                new[i] = new[i] - c * r
            prod_ = new
        return prod_

    def verify(self):
        target = [self.elem(MPoly.const(self.P_bar.coeff(self.var, k).constant_term(), RVARS))
                  for k in range(self.P_bar.degree(self.var) + 1)]
        target[0] = target[0] - self.t()
        got = self.product_of_roots()
        if len(got) != len(target) or any(a != b for a, b in zip(got, target)):
            raise InternalConsistencyError("roots do not multiply to P(y) - t")
        for i, j in combinations(range(len(self.roots)), 2):
            if not self.is_unit(self.roots[i] - self.roots[j]):
                raise InternalConsistencyError(f"root difference {i},{j} is not a unit of B")
        for gi, (_, perm) in enumerate(self.galois):
            for i, r in enumerate(self.roots):
                if self.act(gi, r) != self.roots[perm[i]]:
                    raise InternalConsistencyError("Galois action does not permute the roots")
        return True

    def to_json(self):
        return {
            "P": str(self.P_bar),
            "alpha": str(self.alpha),
            "modulus": str(self.modulus),
            "roots": [str(r) for r in self.roots],
            "galois": [{"s": str(img), "perm": list(p)} for img, p in self.galois],
        }


class RElem:
    """num / alpha^k in R~, num reduced modulo m(s)."""

    __slots__ = ("alg", "num", "k")

    def __init__(self, alg: SplittingAlgebra, num: MPoly, k: int = 0):
        num = alg.reduce(num)
        if not num:
            k = 0
        while k > 0:
            q, r = num.divmod(alg.alpha_r)
            if r:
                break
            num, k = q.with_vars(RVARS), k - 1
        self.alg = alg
        self.num = num
        self.k = k

    def _coerce(self, other):
        if isinstance(other, RElem):
            return other
        return self.alg.elem(other)

    def __add__(self, other):
        other = self._coerce(other)
        K = max(self.k, other.k)
        a = self.num * (self.alg.alpha_r ** (K - self.k)) if K > self.k else self.num
        b = other.num * (self.alg.alpha_r ** (K - other.k)) if K > other.k else other.num
        return RElem(self.alg, a + b, K)

    __radd__ = __add__

    def __neg__(self):
        return RElem(self.alg, -self.num, self.k)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, BaseElem)):
            return RElem(self.alg, self.num * other, self.k)
        other = self._coerce(other)
        return RElem(self.alg, self.num * other.num, self.k + other.k)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = self.alg.one()
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, RElem):
            other = self._coerce(other)
        a = self.num * (self.alg.alpha_r ** other.k)
        b = other.num * (self.alg.alpha_r ** self.k)
        return self.alg.reduce(a - b).is_zero()

    def __hash__(self):
        return hash(str(self))

    def __bool__(self):
        return bool(self.num)

    def x_order(self):
        return self.num.x_order()

    def residue(self) -> "RElem":
        return RElem(self.alg, self.num.residue(), self.k)

    def exact_div_x(self, k: int) -> "RElem":
        return RElem(self.alg, self.num.exact_div_x(k), self.k)

    def scale_x(self, k: int) -> "RElem":
        return RElem(self.alg, self.num * BaseElem.x(k), self.k)

    def is_residue(self):
        return self.num.is_residue()

    def __str__(self):
        if self.k == 0:
            return str(self.num)
        a = str(self.alg.alpha)
        den = f"({a})" if self.k == 1 else f"({a})^{self.k}"
        return f"({self.num})/{den}"

    __repr__ = __str__


# ---------------------------------------------------------------------------
# splitting construction


def splitting_build(P_bar: MPoly, alpha: MPoly, var="y", user=None) -> SplittingAlgebra:
    """Splitting algebra of P_bar(y) - t for monic P_bar of degree 1 or 2.

    Higher degrees need ``user`` data (a dict in the splitting-file format).
    """
    P_bar = P_bar.with_vars((var,))
    deg = P_bar.degree(var)
    if P_bar.coeff(var, deg) != 1:
        raise PreconditionError("P must be monic")
    if user is not None:
        return splitting_from_data(user, P_bar, alpha, var)
    if deg == 1:
        c = P_bar.coeff(var, 0).constant_term()
        alg = SplittingAlgebra(P_bar, alpha, MPoly.var("s", RVARS),
                               [MPoly.var("t", RVARS) - c], [(MPoly.var("s", RVARS), (0,))], var)
    elif deg == 2:
        b = P_bar.coeff(var, 1).constant_term()
        c = P_bar.coeff(var, 0).constant_term()
        t, s = MPoly.gens(RVARS)
        D = t + b * b * Fraction(1, 4) - c
        shift = -b * Fraction(1, 2)
        alg = SplittingAlgebra(P_bar, alpha, s * s - D, [s + shift, -s + shift],
                               [(s, (0, 1)), (-s, (1, 0))], var)
    else:
        raise UnsupportedSplittingError(
            f"no automatic splitting for {P_bar} - t of degree {deg}; supply a splitting file"
        )
    alg.verify()
    return alg


def splitting_from_data(data: dict, P_bar: MPoly | None = None, alpha: MPoly | None = None, var="y"):
    """Build a SplittingAlgebra from the splitting-file dictionary."""
    try:
        P_file = parse_poly(data["P"], (var,))
        modulus = parse_poly(data["modulus"], RVARS)
        roots = [parse_poly(r, RVARS) for r in data["roots"]]
        galois = [(parse_poly(g["s"], RVARS), tuple(int(i) for i in g["perm"])) for g in data.get("galois", [])]
        alpha_file = parse_poly(data["alpha"], ("t",)) if "alpha" in data else None
    except KeyError as exc:
        raise SchemaError(f"splitting data is missing {exc}") from None
    if P_bar is not None and P_file != P_bar:
        raise SchemaError(f"splitting data is for {P_file}, not {P_bar}")
    if alpha is None:
        alpha = alpha_file
    if alpha is None:
        raise SchemaError("splitting data needs alpha")
    if not galois:
        galois = [(MPoly.var("s", RVARS), tuple(range(len(roots))))]
    alg = SplittingAlgebra(P_file, alpha, modulus, roots, galois, var)
    alg.verify()
    return alg


def load_splitting_file(path):
    with open(path) as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "splittings" in data:
        return data["splittings"]
    return data if isinstance(data, list) else [data]


# ---------------------------------------------------------------------------
# polynomials in y over R~


def eval_poly(P: MPoly, alg: SplittingAlgebra, value: RElem, var="y") -> RElem:
    """P(value) for P in A[var]."""
    acc = alg.zero()
    for k in range(P.degree(var), -1, -1):
        acc = acc * value + alg.elem(MPoly.const(P.coeff(var, k).constant_term(), RVARS))
    return acc


def _poly_coeffs(P: MPoly, alg, var="y"):
    return [alg.elem(MPoly.const(P.coeff(var, k).constant_term(), RVARS)) for k in range(P.degree(var) + 1)]


@dataclass
class AtlasData:
    """Lifted roots, the S1/S2 factorization and the chart coordinates."""

    side: str
    n: int
    P: MPoly
    other: MPoly
    splitting: SplittingAlgebra
    sigmas: list
    mus: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    S1: list | None = None
    S2: list | None = None
    v_charts: list = field(default_factory=list)

    def to_json(self):
        return {
            "side": self.side,
            "n": self.n,
            "P": str(self.P),
            "other": str(self.other),
            "splitting": self.splitting.to_json(),
            "sigmas": [str(s) for s in self.sigmas],
            "lambdas": [[str(l) for l in step] for step in self.lambdas],
            "S1": None if self.S1 is None else [str(c) for c in self.S1],
            "S2": None if self.S2 is None else [str(c) for c in self.S2],
            "u_charts": [f"(y - ({s}))/x^{self.n}" for s in self.sigmas],
            "v_charts": list(self.v_charts),
        }


def hensel_lift_sigmas(P: MPoly, alg: SplittingAlgebra, n: int, var="y") -> AtlasData:
    """Lift the roots t_g of P_bar(y) - t to sigma_g with P(sigma_g) = t mod x^n.

    Update: sigma <- sigma + x^(m+1) lambda with lambda = -mu / prod(t_g - t_h),
    where P(sigma) - t = x^(m+1) mu.
    """
    if n < 1:
        raise PreconditionError("n must be at least 1")
    if P.residue().with_vars((var,)) != alg.P_bar:
        raise PreconditionError("residue of P differs from the split polynomial")
    roots = alg.roots
    denoms = []
    for i, ti in enumerate(roots):
        d = alg.one()
        for j, tj in enumerate(roots):
            if j != i:
                d = d * (ti - tj)
        try:
            denoms.append(alg.inverse(d))
        except NotInvertibleError as exc:
            raise InternalError("root differences are not invertible") from exc
    sigmas = list(roots)
    t = alg.t()
    mus, lambdas = [], []
    for m in range(n - 1):
        step_mu, step_lam = [], []
        for i in range(len(sigmas)):
            val = eval_poly(P, alg, sigmas[i], var) - t
            if val.x_order() < m + 1:
                raise InternalError("lifting lost x-adic precision")
            mu = val.exact_div_x(m + 1)
            lam = -(mu * denoms[i])
            sigmas[i] = sigmas[i] + lam.scale_x(m + 1)
            step_mu.append(mu)
            step_lam.append(lam)
        mus.append(step_mu)
        lambdas.append(step_lam)
    for s in sigmas:
        if (eval_poly(P, alg, s, var) - t).x_order() < n:
            raise InternalError("lifted root fails P(sigma) = t mod x^n")
    for gi, (_, perm) in enumerate(alg.galois):
        for i, s in enumerate(sigmas):
            if alg.act(gi, s) != sigmas[perm[i]]:
                raise InternalConsistencyError("lifted roots are not Galois equivariant")
    return AtlasData("", n, P, MPoly(P.vars), alg, sigmas, mus, lambdas)


def s1_s2_factor(P: MPoly, sigmas, n: int, alg: SplittingAlgebra, var="y"):
    """P(y) - t = S1(y) prod(y - sigma_g) + x^n S2(y) over R~."""
    target = _poly_coeffs(P, alg, var)
    target[0] = target[0] - alg.t()
    divisor = alg.product_of_roots(sigmas)
    r = len(divisor) - 1
    rem = list(target)
    quot = [alg.zero()] * max(len(rem) - r, 1)
    for k in range(len(rem) - 1 - r, -1, -1):
        c = rem[k + r]
        quot[k] = c
        for j, dc in enumerate(divisor):
            rem[k + j] = rem[k + j] - c * dc
    rem = rem[:r]
    S2 = []
    for c in rem:
        if c and c.x_order() < n:
            raise InternalError("remainder is not divisible by x^n")
        S2.append(c.exact_div_x(n) if c else c)
    # exact re-expansion
    lhs = [alg.zero()] * max(len(target), len(quot) + r)
    for i, a in enumerate(quot):
        for j, b in enumerate(divisor):
            lhs[i + j] = lhs[i + j] + a * b
    for i, c in enumerate(S2):
        lhs[i] = lhs[i] + c.scale_x(n)
    while len(target) < len(lhs):
        target.append(alg.zero())
    if any(a != b for a, b in zip(lhs, target)):
        raise InternalError("S1/S2 identity does not re-expand")
    # residue of S1 must be invertible in B[y] (constant unit leading behaviour)
    S1_res = [c.residue() for c in quot]
    while len(S1_res) > 1 and not S1_res[-1]:
        S1_res.pop()
    if len(S1_res) != 1 or not alg.is_unit(S1_res[0]):
        raise InternalError("residue of S1 is not invertible")
    return quot, S2


# ---------------------------------------------------------------------------
# cocycle


@dataclass
class CocycleEntry:
    numerator: RElem  # f = x^-n * numerator
    m: int | None
    F: RElem | None


@dataclass
class Cocycle:
    """f_{g,h} = x^-n (P_other(sigma_g) - P_other(sigma_h)), as x^-m F."""

    n: int
    entries: dict
    splitting: SplittingAlgebra

    def f(self, g, h) -> CocycleEntry:
        return self.entries[(g, h)]

    @property
    def indices(self):
        return sorted({g for g, _ in self.entries} | {h for _, h in self.entries})

    def to_json(self):
        return {
            f"{g},{h}": {"f": f"x^-{self.n}*({e.numerator})", "m": e.m, "F": None if e.F is None else str(e.F)}
            for (g, h), e in sorted(self.entries.items())
        }


def _chart_v(other: MPoly, sigma: RElem, n: int, alg, var="y", u="u_g", zvar="zm"):
    """v_g = z - x^-n (P_other(x^n u + sigma) - P_other(sigma)) as text."""
    coeffs = _poly_coeffs(other, alg, var)
    # expand P_other(sigma + x^n u) in powers of u by Taylor shift
    deg = len(coeffs) - 1
    out = []
    for k in range(1, deg + 1):
        # coefficient of u^k: x^(nk) * sum_j C(j,k) c_j sigma^(j-k)
        acc = alg.zero()
        for j in range(k, deg + 1):
            acc = acc + coeffs[j] * (sigma ** (j - k)) * comb(j, k)
        term = acc.scale_x(n * k)
        if term.x_order() < n:
            raise InternalError("chart coordinate is not x^n divisible")
        out.append((k, term.exact_div_x(n)))
    parts = [zvar] + [f"-({c})*{u}^{k}" for k, c in out if c]
    return " ".join(parts)


def cocycle_from_values(values, n: int, alg: SplittingAlgebra) -> Cocycle:
    """f_{g,h} = x^-n (values[g] - values[h]) for every ordered pair."""
    entries = {}
    r = len(values)
    for g in range(r):
        for h in range(r):
            N = values[g] - values[h]
            if not N:
                entries[(g, h)] = CocycleEntry(N, None, None)
                continue
            o = N.x_order()
            entries[(g, h)] = CocycleEntry(N, n - o, N.exact_div_x(o))
    for (g, h), e in entries.items():
        if e.numerator + entries[(h, g)].numerator:
            raise InternalConsistencyError("cocycle is not antisymmetric")
    for g in range(r):
        for h in range(r):
            for k in range(r):
                if entries[(g, h)].numerator + entries[(h, k)].numerator != entries[(g, k)].numerator:
                    raise InternalConsistencyError("cocycle is not additive")
    return Cocycle(n, entries, alg)


def chart_cocycle(atlas: AtlasData, other: MPoly, n: int, var="y") -> Cocycle:
    """Gluing cocycle of the charts v_g, from the other branch polynomial."""
    alg = atlas.splitting
    values = [eval_poly(other, alg, s, var) for s in atlas.sigmas]
    atlas.v_charts = [_chart_v(other, s, n, alg, var) for s in atlas.sigmas]
    return cocycle_from_values(values, n, alg)


# ---------------------------------------------------------------------------
# separatedness and affineness


@dataclass
class SeparatednessResult:
    separated: bool
    pairs: dict
    witness: tuple | None = None
    reason: str = ""
    norm: MPoly | None = None
    non_unit_factor: MPoly | None = None
    vanishing_roots: list = field(default_factory=list)

    def __bool__(self):
        return self.separated

    def to_json(self):
        return {
            "separated": self.separated,
            "reason": self.reason,
            "witness_pair": None if self.witness is None else list(self.witness),
            "norm": None if self.norm is None else str(self.norm),
            "non_unit_factor": None if self.non_unit_factor is None else str(self.non_unit_factor),
            "vanishing_roots": [str(r) for r in self.vanishing_roots],
            "pairs": {f"{g},{h}": v for (g, h), v in sorted(self.pairs.items())},
        }


def _rational_roots(p):
    """Rational roots of a univariate t-polynomial (dense)."""
    if not p:
        return []
    p = up.monic(p)
    den = 1
    for c in p:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in p]
    while ints and ints[0] == 0:
        ints = ints[1:]
    roots = {Fraction(0)} if len(ints) < len(p) else set()
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(v):
        return [d for d in range(1, v + 1) if v % d == 0] if v else [1]

    for a in divisors(a0):
        for b in divisors(an):
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if up.evaluate(p, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def separatedness_check(c: Cocycle, splitting: SplittingAlgebra | None = None) -> SeparatednessResult:
    """Separated iff every f_{g,h} (g != h) is x^-m times a unit, with m >= 1."""
    alg = splitting or c.splitting
    pairs = {}
    for (g, h), e in sorted(c.entries.items()):
        if g >= h:
            continue
        if e.m is None:
            return SeparatednessResult(False, pairs, (g, h), "f vanishes identically")
        if e.m < 1:
            return SeparatednessResult(False, pairs, (g, h), f"f has no pole along x (m = {e.m})")
        unit, rest = alg.unit_status(e.F.residue())
        N, _ = alg.norm(e.F.residue())
        if not unit:
            roots = _rational_roots(rest.to_dense("t")) if rest else []
            return SeparatednessResult(
                False, pairs, (g, h),
                f"residue of F is not a unit of B: norm has the factor {rest}",
                MPoly.from_dense(N, "t"), rest, roots,
            )
        pairs[(g, h)] = {"m": e.m, "F": str(e.F), "norm": str(MPoly.from_dense(N, "t"))}
    return SeparatednessResult(True, pairs, None, "every gluing function is x^-m times a unit")


@dataclass
class AffinenessNode:
    charts: tuple
    pair: tuple | None = None
    m: int | None = None
    thetas: dict = field(default_factory=dict)
    witness: dict = field(default_factory=dict)
    children: list = field(default_factory=list)

    def depth(self) -> int:
        return 0 if not self.children else 1 + max(ch.depth() for ch in self.children)

    def to_json(self):
        return {
            "charts": list(self.charts),
            "pair": None if self.pair is None else list(self.pair),
            "m": self.m,
            "thetas": {str(k): v for k, v in self.thetas.items()},
            "witness": self.witness,
            "children": [ch.to_json() for ch in self.children],
        }


def psi_affineness(charts, c: Cocycle) -> AffinenessNode:
    """Certificate tree for the affineness of the glued quotient."""
    sep = separatedness_check(c)
    if not sep:
        raise PreconditionError("cocycle is not separated")
    return _psi(tuple(charts), c)


def _psi(charts, c: Cocycle) -> AffinenessNode:
    alg = c.splitting
    if len(charts) <= 1:
        return AffinenessNode(charts)
    best = None
    for g, h in combinations(charts, 2):
        m = c.f(g, h).m
        if best is None or m > best[2]:
            best = (g, h, m)
    g, h, m = best
    thetas = {g: alg.zero()}
    for k in charts:
        if k != g:
            e = c.f(g, k)
            thetas[k] = e.F.scale_x(m - e.m)
    # gluing: theta_b - theta_a = x^m f_{a,b}, compared after multiplying by x^n
    for a, b in combinations(charts, 2):
        lhs = (thetas[b] - thetas[a]).scale_x(c.n)
        rhs = c.f(a, b).numerator.scale_x(m)
        if lhs != rhs:
            raise InternalConsistencyError(f"psi sections do not glue on charts {a}, {b}")
    F = thetas[h]
    a = alg.inverse(F.residue())
    one_minus = alg.one() - a * F
    if one_minus and one_minus.x_order() < 1:
        raise InternalConsistencyError("a*F is not 1 mod x")
    cofactor_x = one_minus.exact_div_x(1) if one_minus else one_minus
    if cofactor_x.scale_x(1) + a * F != alg.one():
        raise InternalConsistencyError("unit-ideal witness does not verify")
    node = AffinenessNode(
        charts, (g, h), m, {k: str(v) for k, v in thetas.items()},
        {"generators": ["x", "psi", f"psi - theta_{h}"],
         "cofactors": [str(cofactor_x), str(a), str(-a)]},
    )
    node.children = [_psi(tuple(k for k in charts if k != g), c), _psi(tuple(k for k in charts if k != h), c)]
    return node


# ---------------------------------------------------------------------------
# general position


@dataclass
class GeneralPositionData:
    shear: tuple
    pre_shift: str | None
    scalars: tuple
    P_plus: MPoly
    P_minus: MPoly
    alpha_plus: MPoly
    alpha_minus: MPoly
    Phi_plus: MPoly
    Phi_minus: MPoly
    Gamma_plus: MPoly
    Gamma_minus: MPoly
    steps: list
    tried: int = 0

    def to_json(self):
        return {
            "shear": [str(v) for v in self.shear],
            "pre_shift": self.pre_shift,
            "scalars": [str(v) for v in self.scalars],
            "P_plus": str(self.P_plus),
            "P_minus": str(self.P_minus),
            "alpha_plus": str(self.alpha_plus),
            "alpha_minus": str(self.alpha_minus),
            "Phi_plus": str(self.Phi_plus),
            "Phi_minus": str(self.Phi_minus),
            "Gamma_plus": str(self.Gamma_plus),
            "Gamma_minus": str(self.Gamma_minus),
            "candidates_tried": self.tried,
        }


def shear_candidates():
    """Deterministic enumeration of (a, b), a != 0, by growing height."""
    seen = set()
    h = 0
    while True:
        vals = sorted({Fraction(p, q) for p in range(-h, h + 1) for q in range(1, h + 1 if h else 2)},
                      key=lambda v: (abs(v.numerator) + v.denominator, v < 0, abs(v)))
        for b in vals:
            for a in vals:
                if a == 0 or (a, b) in seen:
                    continue
                seen.add((a, b))
                yield a, b
        h += 1


def _composed(alpha: MPoly, P: MPoly, var="y") -> MPoly:
    return alpha.subs({"t": P.with_vars((var,))}).with_vars((var,)) if alpha.used_vars() else alpha.with_vars((var,))


def _branch_data(p: MPoly, var="y"):
    pb = p.residue().with_vars((var,))
    Pb = integral(pb, var)
    return pb, Pb, minimal_polynomial_mod(Pb, pb, var)


def general_position(d: TwinDerivation, budget=100):
    """Conjugate d into general position and monicize the branch polynomials."""
    if d.n < 1:
        raise PreconditionError("n must be at least 1")
    if not fpf_check(d):
        raise PreconditionError("derivation is not fixed point free")
    y, zp, zm = d.vars
    V = d.vars
    Zp, Zm = MPoly.var(zp, V), MPoly.var(zm, V)
    steps = []
    pp, pm = d.p_plus, d.p_minus
    pre = None
    if not pp.residue():
        pre = "zp -> zp + zm"
        pp = pp + pm
        steps.append(NormalizationStep("Shear", {"rule": pre}, {zp: Zp + Zm}, {zp: Zp - Zm}, pre))
    elif not pm.residue():
        pre = "zm -> zm + zp"
        pm = pm + pp
        steps.append(NormalizationStep("Shear", {"rule": pre}, {zm: Zm + Zp}, {zm: Zm - Zp}, pre))
    ppb, Ppb, ap = _branch_data(pp, y)
    tried = 0
    chosen = None
    for a, b in shear_candidates():
        if tried >= budget:
            break
        tried += 1
        cand = pm * a + pp * b
        cb = cand.residue().with_vars((y,))
        if not cb or not uni_gcd(ppb, cb, var=y).is_constant():
            continue
        _, Pmb, am = _branch_data(cand, y)
        lhs = _composed(ap, Ppb, y)
        rhs = _composed(am, Pmb, y)
        if not uni_gcd(lhs, rhs, var=y).is_constant():
            continue
        chosen = (a, b, cand)
        break
    if chosen is None:
        raise SearchBudgetError(f"no shear in general position among {tried} candidates")
    a, b, pm = chosen
    if (a, b) != (1, 0):
        steps.append(NormalizationStep("Shear", {"a": a, "b": b}, {zm: Zm * a + Zp * b}, {zm: (Zm - Zp * b) * (1 / a)},
                                       f"zm -> {a}*zm + {b}*zp"))
    # monicize the residues of the integrals
    cp = _monic_scalar(pp, y)
    cm = _monic_scalar(pm, y)
    pp, pm = pp * cp, pm * cm
    if (cp, cm) != (1, 1):
        steps.append(NormalizationStep("Monicize", {"c_plus": cp, "c_minus": cm},
                                       {zp: Zp * cp, zm: Zm * cm}, {zp: Zp * (1 / cp), zm: Zm * (1 / cm)},
                                       ", ".join(f"{v} -> {c}*{v}" for v, c in ((zp, cp), (zm, cm)) if c != 1)))
    new = TwinDerivation(d.n, pp, pm, d.trail + tuple(steps), V)
    ppb, Ppb, ap = _branch_data(pp, y)
    pmb, Pmb, am = _branch_data(pm, y)
    P_plus, P_minus = integral(pp, y), integral(pm, y)
    xn = BaseElem.x(d.n)
    Phi_p = -Zp * xn + P_plus.with_vars(V)
    Phi_m = -Zm * xn + P_minus.with_vars(V)
    for phi in (Phi_p, Phi_m):
        if apply_derivation(new, phi):
            raise InternalConsistencyError("Phi is not an invariant")
    Gamma_p = ap.subs({"t": Phi_p}).with_vars(V) if ap.used_vars() else ap.with_vars(V)
    Gamma_m = am.subs({"t": Phi_m}).with_vars(V) if am.used_vars() else am.with_vars(V)
    if not uni_gcd(ppb, pmb, var=y).is_constant():
        raise InternalConsistencyError("condition a) fails after the transformation")
    if not uni_gcd(_composed(ap, Ppb, y), _composed(am, Pmb, y), var=y).is_constant():
        raise InternalConsistencyError("condition b) fails after the transformation")
    data = GeneralPositionData((a, b), pre, (cp, cm), P_plus, P_minus, ap, am, Phi_p, Phi_m,
                               Gamma_p, Gamma_m, steps, tried)
    return new, data


def _monic_scalar(p: MPoly, var) -> Fraction:
    Pb = integral(p.residue().with_vars((var,)), var)
    lc = Pb.coeff(var, Pb.degree(var)).constant_term().constant()
    return 1 / lc


# ---------------------------------------------------------------------------
# one side of the atlas


@dataclass
class SideAtlas:
    side: str
    atlas: AtlasData
    cocycle: Cocycle
    separatedness: SeparatednessResult
    affineness: AffinenessNode | None = None

    def to_json(self):
        return {
            "side": self.side,
            "atlas": self.atlas.to_json(),
            "cocycle": self.cocycle.to_json(),
            "separatedness": self.separatedness.to_json(),
            "affineness": None if self.affineness is None else self.affineness.to_json(),
        }


def build_side(d: TwinDerivation, gp: GeneralPositionData, side: str, user_splittings=()):
    """Atlas over U_plus (side '+') or U_minus (side '-')."""
    y = d.vars[0]
    if side == "+":
        P, other, alpha = gp.P_plus.with_vars((y,)), gp.P_minus.with_vars((y,)), gp.alpha_plus
    else:
        P, other, alpha = gp.P_minus.with_vars((y,)), gp.P_plus.with_vars((y,)), gp.alpha_minus
    Pb = P.residue()
    user = None
    for data in user_splittings:
        try:
            if parse_poly(data["P"], (y,)) == Pb:
                user = data
                break
        except (KeyError, ParseError, VariableError):
            continue
    alg = splitting_build(Pb, alpha, y, user)
    atlas = hensel_lift_sigmas(P, alg, d.n, y)
    atlas.side = side
    atlas.other = other
    atlas.S1, atlas.S2 = s1_s2_factor(P, atlas.sigmas, d.n, alg, y)
    cocycle = chart_cocycle(atlas, other, d.n, y)
    sep = separatedness_check(cocycle, alg)
    aff = psi_affineness(range(len(atlas.sigmas)), cocycle) if sep else None
    return SideAtlas(side, atlas, cocycle, sep, aff)


def replay_atlas_certificate(cert: dict) -> bool:
    """Recompute the NotSeparated verdict from the stored twin data and pair."""
    twin = TwinDerivation(int(cert["n"]), cert["p_plus"], cert["p_minus"])
    y = twin.vars[0]
    side = cert["side"]
    P = integral(twin.p_plus if side == "+" else twin.p_minus, y).with_vars((y,))
    other = integral(twin.p_minus if side == "+" else twin.p_plus, y).with_vars((y,))
    p = (twin.p_plus if side == "+" else twin.p_minus).residue().with_vars((y,))
    alpha = minimal_polynomial_mod(P.residue(), p, y)
    splitting = cert.get("splitting_data")
    alg = splitting_build(P.residue(), alpha, y, splitting)
    atlas = hensel_lift_sigmas(P, alg, twin.n, y)
    c = chart_cocycle(atlas, other, twin.n, y)
    g, h = cert["pair"]
    e = c.f(g, h)
    if e.m is None or e.m < 1:
        return True
    unit, rest = alg.unit_status(e.F.residue())
    return (not unit) and str(rest) == cert["non_unit_factor"]
