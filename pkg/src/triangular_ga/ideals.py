"""Ideal-theoretic tools: univariate gcd, resultants, minimal polynomials,
Buchberger over Q and membership in ideals of the form (x^n, H) over A.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import _upoly as up
from .errors import (
    DegenerateError,
    InternalConsistencyError,
    VariableError,
)
from .ring import UNIFORMIZER, BaseElem, MPoly


# ---------------------------------------------------------------------------
# univariate helpers over the residue field


def _single_var(*polys, var=None):
    if var is not None:
        return var
    used = set()
    for p in polys:
        used.update(p.used_vars())
    if len(used) > 1:
        raise VariableError(f"expected univariate polynomials, found variables {sorted(used)}")
    if used:
        return used.pop()
    for p in polys:
        if p.vars:
            return p.vars[0]
    return "y"


def uni_gcd(f: MPoly, g: MPoly, var=None) -> MPoly:
    """Monic gcd of two univariate residue polynomials."""
    var = _single_var(f, g, var=var)
    a, b = f.to_dense(var), g.to_dense(var)
    if not a and not b:
        raise ArithmeticError("gcd(0, 0) is undefined")
    return MPoly.from_dense(up.gcd(a, b), var, _vars_for(var, f, g))


def _vars_for(var, *polys):
    for p in polys:
        if var in p.vars:
            return p.vars
    return (var,)


def squarefree_part(f: MPoly, var=None) -> MPoly:
    var = _single_var(f, var=var)
    a = f.to_dense(var)
    if not a:
        raise ArithmeticError("squarefree part of 0")
    g = up.gcd(a, up.deriv(a))
    return MPoly.from_dense(up.monic(up.divmod_(a, g)[0]), var, _vars_for(var, f))


def uni_divides(d: MPoly, f: MPoly, var=None) -> bool:
    var = _single_var(d, f, var=var)
    a, b = d.to_dense(var), f.to_dense(var)
    if not a:
        return not b
    return not up.divmod_(b, a)[1]


# ---------------------------------------------------------------------------
# resultants


def sylvester_matrix(f: MPoly, g: MPoly, var):
    """Rows: deg g shifted copies of f, then deg f shifted copies of g."""
    df, dg = f.degree(var), g.degree(var)
    size = df + dg
    fc = [f.coeff(var, k).with_vars(f.vars) for k in range(df, -1, -1)]
    gc = [g.coeff(var, k).with_vars(g.vars) for k in range(dg, -1, -1)]
    zero = MPoly(f.vars)
    rows = []
    for i in range(dg):
        rows.append([zero] * i + fc + [zero] * (size - i - len(fc)))
    for i in range(df):
        rows.append([zero] * i + gc + [zero] * (size - i - len(gc)))
    return rows


def _bareiss_det(matrix):
    m = [row[:] for row in matrix]
    size = len(m)
    if size == 0:
        return None
    sign = 1
    prev = None
    for k in range(size - 1):
        if not m[k][k]:
            for i in range(k + 1, size):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return m[0][0] * 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                num = m[k][k] * m[i][j] - m[i][k] * m[k][j]
                m[i][j] = num if prev is None else num.exact_div(prev)
            m[i][k] = m[i][k] * 0
        prev = m[k][k]
    det = m[size - 1][size - 1]
    return det if sign > 0 else -det


def resultant(f: MPoly, g: MPoly, var) -> MPoly:
    """Resultant in ``var``: the Sylvester determinant with the rows of f first.

    Coefficients must be rational (exact division of polynomials is used in
    the fraction-free elimination). The result is free of ``var``.
    """
    if var not in f.vars and var not in g.vars:
        raise VariableError(f"{var!r} occurs in neither polynomial")
    f, g = f._align(g)
    if not f or not g:
        return MPoly(f.vars)
    df, dg = f.degree(var), g.degree(var)
    if df == 0 and dg == 0:
        return MPoly.const(1, f.vars)
    if df == 0:
        return f ** dg
    if dg == 0:
        return g ** df
    return _bareiss_det(sylvester_matrix(f, g, var))


# ---------------------------------------------------------------------------
# minimal polynomials in kappa[y]/(p)


def _solve_dependency(vectors):
    """Coefficients c with sum c_i v_i = 0 and c_last = 1, or None if independent."""
    k = len(vectors)
    dim = len(vectors[0])
    # columns are vectors[:-1]; rhs is -vectors[-1]
    rows = [[vectors[j][i] for j in range(k - 1)] + [-vectors[-1][i]] for i in range(dim)]
    pivots = []
    r = 0
    for c in range(k - 1):
        piv = next((i for i in range(r, dim) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(dim):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, dim):
        if rows[i][-1] != 0:
            return None
    sol = [Fraction(0)] * (k - 1)
    for i, c in enumerate(pivots):
        sol[c] = rows[i][-1]
    return sol + [Fraction(1)]


def minimal_polynomial_mod(P: MPoly, p: MPoly, var="y", tvar="t") -> MPoly:
    """Monic generator of the kernel of kappa[t] -> kappa[var]/(p), t -> P."""
    pd = p.to_dense(var)
    Pd = P.to_dense(var)
    if not pd:
        raise DegenerateError("minimal polynomial modulo the zero polynomial")
    d = up.degree(pd)
    if d == 0:
        return MPoly.const(1, (tvar,))
    base = up.divmod_(Pd, pd)[1]
    vectors = []
    power = up.ONE
    for _ in range(d + 1):
        vec = list(power) + [Fraction(0)] * (d - len(power))
        vectors.append(vec)
        sol = _solve_dependency(vectors)
        if sol is not None:
            return MPoly.from_dense(sol, tvar)
        power = up.divmod_(up.mul(power, base), pd)[1]
    raise InternalConsistencyError("no linear dependency among d+1 powers")  # Cayley-Hamilton


# ---------------------------------------------------------------------------
# Buchberger over Q
#
# Internally a polynomial is a dict {exponent tuple: Fraction}. The uniformizer
# may occur as an ordinary variable named "x" here.


def _grevlex(e):
    return (sum(e), tuple(-v for v in reversed(e)))


def _lex(e):
    return e


ORDERS = {"grevlex": _grevlex, "lex": _lex}


def _to_raw(p: MPoly, variables):
    """MPoly (x allowed in polynomial coefficients) to raw dict on variables."""
    xi = variables.index(UNIFORMIZER) if UNIFORMIZER in variables else None
    pos = []
    for i, v in enumerate(p.vars):
        if v in variables:
            pos.append((variables.index(v), i))
    used = set(p.used_vars())
    for v in used:
        if v not in variables:
            raise VariableError(f"variable {v!r} missing from {variables}")
    out = {}
    n = len(variables)
    for e, c in p.terms.items():
        base = [0] * n
        for j, i in pos:
            base[j] = e[i]
        if c.is_constant():
            out[tuple(base)] = out.get(tuple(base), 0) + c.constant()
            continue
        if xi is None or not c.is_polynomial():
            raise VariableError(f"coefficient {c} is not usable in a polynomial ring over Q")
        for k, r in enumerate(c.num):
            if r:
                base[xi] = k
                out[tuple(base)] = r
    return {e: c for e, c in out.items() if c}


def _from_raw(d, variables) -> MPoly:
    if UNIFORMIZER in variables:
        i = variables.index(UNIFORMIZER)
        rest = variables[:i] + variables[i + 1:]
        terms = {}
        for e, c in d.items():
            key = e[:i] + e[i + 1:]
            terms[key] = terms.get(key, BaseElem.coerce(0)) + BaseElem.x(e[i]) * c
        return MPoly(rest, terms)
    return MPoly(variables, {e: c for e, c in d.items()})


def _lead(p, key):
    e = max(p, key=key)
    return e, p[e]


def _divides(a, b):
    return all(i <= j for i, j in zip(a, b))


def _sub_mul(p, c, shift, g):
    """p - c * X^shift * g, in place."""
    for e, v in g.items():
        t = tuple(i + j for i, j in zip(e, shift))
        w = p.get(t, 0) - c * v
        if w:
            p[t] = w
        else:
            p.pop(t, None)


def _add_term(rep, c, shift, other):
    for e, v in other.items():
        t = tuple(i + j for i, j in zip(e, shift))
        w = rep.get(t, 0) + c * v
        if w:
            rep[t] = w
        else:
            rep.pop(t, None)


def _reduce(p, basis, key, reps=None, prep=None):
    """Full reduction of p by basis. Returns remainder (and updates prep)."""
    p = dict(p)
    rem = {}
    leads = [_lead(g, key) for g in basis]
    while p:
        e = max(p, key=key)
        c = p[e]
        for i, (le, lc) in enumerate(leads):
            if _divides(le, e):
                shift = tuple(a - b for a, b in zip(e, le))
                f = c / lc
                _sub_mul(p, f, shift, basis[i])
                if reps is not None:
                    for k in range(len(prep)):
                        _add_term(prep[k], -f, shift, reps[i][k])
                break
        else:
            rem[e] = c
            del p[e]
    return rem


def _spoly(f, g, key):
    ef, cf = _lead(f, key)
    eg, cg = _lead(g, key)
    lcm = tuple(max(a, b) for a, b in zip(ef, eg))
    sf = tuple(a - b for a, b in zip(lcm, ef))
    sg = tuple(a - b for a, b in zip(lcm, eg))
    s = {}
    _add_term(s, 1 / cf, sf, f)
    _add_term(s, -1 / cg, sg, g)
    return s, sf, sg, cf, cg


def _buchberger(polys, key, track):
    nv = None
    basis, reps = [], []
    m = len(polys)
    for i, p in enumerate(polys):
        if p:
            basis.append(dict(p))
            if track:
                r = [{} for _ in range(m)]
                r[i] = {tuple(0 for _ in next(iter(p))): Fraction(1)}
                reps.append(r)
            if nv is None:
                nv = len(next(iter(p)))
    if not basis:
        return [], []
    zero = (0,) * nv
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]

    def lcm_deg(pair):
        a = _lead(basis[pair[0]], key)[0]
        b = _lead(basis[pair[1]], key)[0]
        lcm = tuple(max(x, y) for x, y in zip(a, b))
        return (key(lcm), pair)

    while pairs:
        pairs.sort(key=lcm_deg)
        i, j = pairs.pop(0)
        ei = _lead(basis[i], key)[0]
        ej = _lead(basis[j], key)[0]
        if all(a == 0 or b == 0 for a, b in zip(ei, ej)):
            continue  # coprime leading monomials: S-polynomial reduces to zero
        lcm = tuple(max(a, b) for a, b in zip(ei, ej))
        # chain criterion
        if any(
            k not in (i, j)
            and _divides(_lead(basis[k], key)[0], lcm)
            and (min(i, k), max(i, k)) not in pairs
            and (min(j, k), max(j, k)) not in pairs
            for k in range(len(basis))
        ):
            continue
        s, si, sj, ci, cj = _spoly(basis[i], basis[j], key)
        srep = None
        if track:
            srep = [{} for _ in range(m)]
            for k in range(m):
                _add_term(srep[k], 1 / ci, si, reps[i][k])
                _add_term(srep[k], -1 / cj, sj, reps[j][k])
        r = _reduce(s, basis, key, reps if track else None, srep)
        if r:
            basis.append(r)
            if track:
                reps.append(srep)
            k = len(basis) - 1
            if max(r, key=key) == zero:
                return _finish([basis[k]], [srep] if track else [], key, track)
            pairs.extend((a, k) for a in range(k))
    return _finish(basis, reps, key, track)


def _finish(basis, reps, key, track):
    # drop elements whose leading monomial is divisible by another one
    keep = []
    leads = [_lead(g, key)[0] for g in basis]
    for i, e in enumerate(leads):
        dominated = False
        for j, f in enumerate(leads):
            if j != i and _divides(f, e) and (f != e or j < i):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    basis = [basis[i] for i in keep]
    reps = [reps[i] for i in keep] if track else []
    # inter-reduce and make monic
    out, out_reps = [], []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1:]
        orep = (reps[:i] + reps[i + 1:]) if track else None
        le, lc = _lead(g, key)
        rest = {e: c for e, c in g.items() if e != le}
        grep = [dict(r) for r in reps[i]] if track else None
        red = _reduce(rest, others, key, orep, grep)
        red[le] = lc
        inv = 1 / lc
        out.append({e: c * inv for e, c in red.items()})
        if track:
            out_reps.append([{e: c * inv for e, c in r.items()} for r in grep])
    order = sorted(range(len(out)), key=lambda i: key(_lead(out[i], key)[0]), reverse=True)
    return [out[i] for i in order], ([out_reps[i] for i in order] if track else [])


def _common_vars(polys, variables=None):
    if variables is not None:
        variables = tuple(variables)
    else:
        variables = ()
        for p in polys:
            variables += tuple(v for v in p.vars if v not in variables)
    needs_x = any(not c.is_constant() for p in polys for c in p.terms.values())
    if needs_x and UNIFORMIZER not in variables:
        variables = (UNIFORMIZER,) + variables
    return variables


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced monic Groebner basis over Q; x, when present, is a variable."""

    generators: tuple
    order: str
    variables: tuple

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_constant() and bool(self.generators[0])

    def reduce(self, f: MPoly) -> MPoly:
        key = ORDERS[self.order]
        raw = [_to_raw(g, self.variables) for g in self.generators]
        return _from_raw(_reduce(_to_raw(f, self.variables), raw, key), self.variables)

    def contains(self, f: MPoly) -> bool:
        return not self.reduce(f)

    def __str__(self):
        return "[" + ", ".join(str(g) for g in self.generators) + "]"


def groebner(gens, order="grevlex", variables=None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by ``gens`` over Q.

    Coefficients that are polynomials in x are handled by treating x as an
    extra (first) variable of the polynomial ring.
    """
    gens = [g for g in gens]
    variables = _common_vars(gens, variables)
    key = ORDERS[order]
    raw = [_to_raw(g, variables) for g in gens]
    basis, _ = _buchberger([r for r in raw], key, track=False)
    return GroebnerBasis(tuple(_from_raw(b, variables) for b in basis), order, variables)


def unit_ideal(gens, order="grevlex", variables=None) -> bool:
    return groebner(gens, order, variables).is_unit()


@dataclass
class MembershipWitness:
    """Outcome of an ideal-membership test.

    When ``member`` is true, ``target == sum(c*g for c, g in zip(cofactors,
    generators))`` holds exactly. Otherwise ``refusal`` says why not.
    """

    target: MPoly
    generators: list
    member: bool
    cofactors: list | None = None
    refusal: str | None = None
    method: str = ""
    details: dict = field(default_factory=dict)

    def verify(self) -> bool:
        if not self.member:
            return False
        total = MPoly(self.target.vars)
        for c, g in zip(self.cofactors, self.generators):
            total = total + c * g
        return total == self.target

    def __bool__(self):
        return self.member


def member(f: MPoly, gens, order="grevlex", variables=None) -> MembershipWitness:
    """Membership of f in the ideal generated by gens over Q, with cofactors."""
    gens = list(gens)
    if not gens:
        return MembershipWitness(f, [], not f, [] if not f else None,
                                 None if not f else "empty generator list", "groebner")
    variables = _common_vars(gens + [f], variables)
    key = ORDERS[order]
    raw = [_to_raw(g, variables) for g in gens]
    basis, reps = _buchberger(raw, key, track=True)
    prep = [{} for _ in gens]
    rem = _reduce(_to_raw(f, variables), basis, key, reps, prep)
    if rem:
        return MembershipWitness(f, gens, False, None,
                                 f"normal form {_from_raw(rem, variables)} is nonzero", "groebner")
    # f - sum(quotient * basis) = 0 and prep tracks -(quotients in terms of gens)
    cofactors = [-_from_raw(r, variables) for r in prep]
    w = MembershipWitness(f, gens, True, cofactors, None, "groebner")
    if not w.verify():
        raise InternalConsistencyError("groebner cofactor identity failed to re-expand")
    return w


# ---------------------------------------------------------------------------
# membership in (x^n, H) over A


def layered_membership(f: MPoly, H: MPoly, n: int) -> MembershipWitness:
    """Decide f in (x^n, H) in A[vars] by peeling one power of x at a time.

    Generators of the witness are [x^n, H]. ``n`` may be very large: the loop
    stops as soon as the running remainder is zero.
    """
    f, H = f._align(H)
    Hbar = H.residue()
    if not Hbar:
        raise DegenerateError("residue of H is zero")
    xn = MPoly.const(BaseElem.x(n), f.vars)
    gens = [xn, H]
    cof_H = MPoly(f.vars)
    rem = f
    for j in range(n):
        if not rem:
            return MembershipWitness(f, gens, True, [MPoly(f.vars), cof_H],
                                     method="layered", details={"layers": j})
        quot, r = rem.residue().divmod(Hbar)
        if r:
            return MembershipWitness(
                f, gens, False, None,
                f"layer {j}: residue {rem.residue()} is not divisible by {Hbar}",
                "layered", {"layer": j, "residue": rem.residue(), "remainder": r},
            )
        cof_H = cof_H + quot * BaseElem.x(j)
        rem = (rem - quot * H).exact_div_x(1)
    w = MembershipWitness(f, gens, True, [rem, cof_H], method="layered", details={"layers": n})
    return w


def monitored_layered_membership(f: MPoly, H: MPoly, n: int) -> MembershipWitness:
    """layered_membership plus a Groebner soundness monitor over Q[x, vars].

    A Groebner-positive answer (which uses no x-unit denominators) must be
    confirmed by the layered test.
    """
    w = layered_membership(f, H, n)
    if f.is_x_polynomial() and H.is_x_polynomial():
        xn = MPoly.const(BaseElem.x(n), f.vars)
        g = groebner([xn, H])
        positive = g.contains(f)
        w.details["groebner"] = positive
        if positive and not w.member:
            raise InternalConsistencyError(
                f"Groebner says {f} lies in (x^{n}, {H}) but the layered test refuses"
            )
    return w
