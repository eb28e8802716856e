"""Exact arithmetic over the local ring A = Q[x]_(x) and polynomials over it.

``BaseElem`` is a reduced fraction of polynomials in the uniformizer ``x``
whose denominator does not vanish at 0. ``MPoly`` is a sparse polynomial in
named variables with ``BaseElem`` coefficients. The name ``x`` is reserved
for the uniformizer and never appears in a variable set.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import reduce

from . import _upoly as up
from .errors import DivisibilityError, NotInvertibleError, ParseError, VariableError

UNIFORMIZER = "x"


class BaseElem:
    """Element of A = Q[x] localized at (x), stored as num/den in lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num=up.ZERO, den=up.ONE):
        num = up.trim(num)
        den = up.trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if den != up.ONE:
            g = up.gcd(num, den) if num else den
            if g != up.ONE:
                num = up.divmod_(num, g)[0]
                den = up.divmod_(den, g)[0]
            c = den[-1]
            if c != 1:
                num = up.scale(num, 1 / c)
                den = up.scale(den, 1 / c)
            if not num:
                den = up.ONE
            elif den[0] == 0:
                raise DivisibilityError("denominator vanishes at x = 0: not an element of A")
        self.num = num
        self.den = den

    @classmethod
    def _raw(cls, num, den=up.ONE):
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        return obj

    @classmethod
    def coerce(cls, value) -> "BaseElem":
        if isinstance(value, BaseElem):
            return value
        if isinstance(value, (int, Fraction)):
            return cls._raw(up.const(value))
        raise TypeError(f"cannot convert {type(value).__name__} to BaseElem")

    @classmethod
    def x(cls, k=1) -> "BaseElem":
        return cls._raw(tuple([Fraction(0)] * k + [Fraction(1)]))

    @classmethod
    def poly(cls, coeffs) -> "BaseElem":
        """From polynomial coefficients in x, lowest degree first."""
        return cls._raw(up.trim(coeffs))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            other = BaseElem.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == up.ONE and other.den == up.ONE:
            return BaseElem._raw(up.add(self.num, other.num))
        if self.den == other.den:
            return BaseElem(up.add(self.num, other.num), self.den)
        return BaseElem(
            up.add(up.mul(self.num, other.den), up.mul(other.num, self.den)),
            up.mul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return BaseElem._raw(up.neg(self.num), self.den)

    def __sub__(self, other):
        try:
            other = BaseElem.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return BaseElem.coerce(other) - self

    def __mul__(self, other):
        try:
            other = BaseElem.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == up.ONE and other.den == up.ONE:
            return BaseElem._raw(up.mul(self.num, other.num))
        return BaseElem(up.mul(self.num, other.num), up.mul(self.den, other.den))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        if self.den == up.ONE:
            return BaseElem._raw(up.power(self.num, k))
        return BaseElem(up.power(self.num, k), up.power(self.den, k))

    def exact_div(self, other) -> "BaseElem":
        other = BaseElem.coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by zero in A")
        if not self.num:
            return self
        if self.x_order() < other.x_order():
            raise DivisibilityError(f"{other} does not divide {self} in A")
        num = up.mul(self.num, other.den)
        den = up.mul(self.den, other.num)
        k = other.x_order()
        # strip the common power of x before normalizing
        return BaseElem(num[k:], den[k:])

    def __truediv__(self, other):
        try:
            return self.exact_div(other)
        except TypeError:
            return NotImplemented

    def inverse(self) -> "BaseElem":
        if not self.is_unit():
            raise DivisibilityError(f"{self} is not a unit of A")
        return BaseElem(self.den, self.num)

    # valuation and residue ------------------------------------------------
    def x_order(self):
        """x-adic valuation; math.inf for zero."""
        if not self.num:
            return math.inf
        return up.x_order(self.num)

    def residue(self) -> Fraction:
        if not self.num:
            return Fraction(0)
        return self.num[0] / self.den[0]

    def is_unit(self) -> bool:
        return bool(self.num) and self.num[0] != 0

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return self.den == up.ONE and len(self.num) <= 1

    def is_polynomial(self) -> bool:
        return self.den == up.ONE

    def constant(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a rational constant")
        return self.num[0] if self.num else Fraction(0)

    def truncate(self, k: int) -> "BaseElem":
        """Image in A/x^k, as a polynomial in x of degree < k."""
        if self.den == up.ONE:
            return BaseElem._raw(up.truncate(self.num, k))
        inv = up.series_inverse(self.den, k)
        return BaseElem._raw(up.truncate(up.mul(self.num, inv), k))

    def x_coeff(self, k: int) -> Fraction:
        """Coefficient of x^k in the x-adic expansion."""
        t = self.truncate(k + 1).num
        return t[k] if len(t) > k else Fraction(0)

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = BaseElem.coerce(other)
        if not isinstance(other, BaseElem):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self.den == up.ONE and len(self.num) <= 1:
            return hash(self.num[0] if self.num else 0)
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __str__(self):
        num = _xpoly_str(self.num)
        if self.den == up.ONE:
            return num
        return f"({num})/({_xpoly_str(self.den)})"

    def __repr__(self):
        return f"BaseElem({str(self)!r})"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _xpoly_str(p) -> str:
    if not p:
        return "0"
    parts = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        parts.append((c, _xmono(k)))
    return _join_terms(parts)


def _xmono(k):
    if k == 0:
        return ""
    return UNIFORMIZER if k == 1 else f"{UNIFORMIZER}^{k}"


def _join_terms(parts):
    """parts: list of (Fraction coefficient, monomial string)."""
    out = []
    for i, (c, mono) in enumerate(parts):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if mono:
            body = mono if a == 1 else f"{_frac_str(a)}*{mono}"
        else:
            body = _frac_str(a)
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


ONE = BaseElem.coerce(1)
ZERO_ELEM = BaseElem.coerce(0)


def _check_vars(variables):
    variables = tuple(variables)
    if len(set(variables)) != len(variables):
        raise VariableError(f"duplicate variable names in {variables}")
    for v in variables:
        if v == UNIFORMIZER:
            raise VariableError("'x' is the uniformizer and cannot be a polynomial variable")
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", v):
            raise VariableError(f"invalid variable name {v!r}")
    return variables


def _grlex_key(exps):
    return (sum(exps), exps)


class MPoly:
    """Sparse multivariate polynomial with BaseElem coefficients.

    Values are immutable. Binary operations between polynomials on different
    variable sets work over the union of the two sets (left operand's order
    first).
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables, terms=None):
        self.vars = _check_vars(variables)
        clean = {}
        if terms:
            nv = len(self.vars)
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != nv:
                    raise VariableError(f"exponent {exps} does not match variables {self.vars}")
                c = BaseElem.coerce(c)
                if c:
                    clean[exps] = c
        self.terms = clean

    @classmethod
    def _raw(cls, variables, terms):
        obj = object.__new__(cls)
        obj.vars = variables
        obj.terms = terms
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, variables=()):
        return cls(variables)

    @classmethod
    def const(cls, c, variables=()):
        variables = _check_vars(variables)
        c = BaseElem.coerce(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, name, variables=None):
        variables = _check_vars(variables if variables is not None else (name,))
        if name not in variables:
            raise VariableError(f"{name!r} not in {variables}")
        exps = tuple(1 if v == name else 0 for v in variables)
        return cls._raw(variables, {exps: ONE})

    @classmethod
    def gens(cls, variables):
        variables = _check_vars(variables)
        return tuple(cls.var(v, variables) for v in variables)

    @classmethod
    def parse(cls, text, variables):
        return parse_poly(text, variables)

    # structure ------------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def with_vars(self, variables) -> "MPoly":
        """Re-embed into another variable set that contains every used variable."""
        variables = _check_vars(variables)
        if variables == self.vars:
            return self
        idx = {v: i for i, v in enumerate(variables)}
        for v in self.used_vars():
            if v not in idx:
                raise VariableError(f"variable {v!r} is used but missing from {variables}")
        pos = [(idx[v], i) for i, v in enumerate(self.vars) if v in idx]
        terms = {}
        n = len(variables)
        for exps, c in self.terms.items():
            new = [0] * n
            for j, i in pos:
                new[j] = exps[i]
            terms[tuple(new)] = c
        return MPoly._raw(variables, terms)

    def used_vars(self):
        used = set()
        for exps in self.terms:
            for v, e in zip(self.vars, exps):
                if e:
                    used.add(v)
        return tuple(v for v in self.vars if v in used)

    def drop_unused(self) -> "MPoly":
        return self.with_vars(self.used_vars())

    def _align(self, other):
        if isinstance(other, MPoly):
            if other.vars == self.vars:
                return self, other
            union = self.vars + tuple(v for v in other.vars if v not in self.vars)
            return self.with_vars(union), other.with_vars(union)
        return self, MPoly.const(BaseElem.coerce(other), self.vars)

    def _index(self, var):
        try:
            return self.vars.index(var)
        except ValueError:
            raise VariableError(f"unknown variable {var!r} (have {self.vars})") from None

    def degree(self, var=None):
        """Degree in var, or total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.vars:
            return 0
        i = self._index(var)
        return max(e[i] for e in self.terms)

    def free_of(self, *variables):
        return all(self.degree(v) <= 0 for v in variables)

    def coeff(self, var, k) -> "MPoly":
        """Coefficient of var^k, as a polynomial on the same variable set."""
        if var not in self.vars:
            return self if k == 0 else MPoly(self.vars)
        i = self._index(var)
        terms = {}
        for exps, c in self.terms.items():
            if exps[i] == k:
                terms[exps[:i] + (0,) + exps[i + 1:]] = c
        return MPoly._raw(self.vars, terms)

    def coefficients(self, var):
        """{k: coefficient of var^k} for every k that occurs."""
        return {k: self.coeff(var, k) for k in range(self.degree(var) + 1) if self.coeff(var, k)}

    def constant_term(self) -> BaseElem:
        return self.terms.get((0,) * len(self.vars), ZERO_ELEM)

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def leading(self, order=_grlex_key):
        """(exponents, coefficient) of the largest term under ``order``."""
        exps = max(self.terms, key=order)
        return exps, self.terms[exps]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, (MPoly, BaseElem, int, Fraction)):
            return NotImplemented
        a, b = self._align(other)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            s = terms.get(exps)
            s = c if s is None else s + c
            if s:
                terms[exps] = s
            else:
                terms.pop(exps, None)
        return MPoly._raw(a.vars, terms)

    def __radd__(self, other):
        return self + other

    def __neg__(self):
        return MPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (MPoly, BaseElem, int, Fraction)):
            return NotImplemented
        if isinstance(other, MPoly):
            return self + (-other)
        return self + (-BaseElem.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (BaseElem, int, Fraction)):
            c = BaseElem.coerce(other)
            if not c:
                return MPoly._raw(self.vars, {})
            return MPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = self._align(other)
        terms = {}
        for ea, ca in a.terms.items():
            for eb, cb in b.terms.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                s = terms.get(e)
                p = ca * cb
                terms[e] = p if s is None else s + p
        return MPoly._raw(a.vars, {e: c for e, c in terms.items() if c})

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.const(1, self.vars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale_x(self, k: int) -> "MPoly":
        """Multiply by x^k (k >= 0) or divide exactly by x^(-k)."""
        if k >= 0:
            return self * BaseElem.x(k)
        return self.exact_div_x(-k)

    def exact_div_x(self, k: int) -> "MPoly":
        xk = BaseElem.x(k)
        return MPoly._raw(self.vars, {e: c.exact_div(xk) for e, c in self.terms.items()})

    def exact_div_scalar(self, c) -> "MPoly":
        c = BaseElem.coerce(c)
        return MPoly._raw(self.vars, {e: v.exact_div(c) for e, v in self.terms.items()})

    def divmod(self, divisor: "MPoly", order=_grlex_key):
        """Division by a single polynomial whose leading coefficient is a unit.

        Returns (quotient, remainder); divisibility holds iff the remainder is 0.
        """
        a, d = self._align(divisor)
        if not d.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        lexp, lcoef = d.leading(order)
        if not lcoef.is_unit():
            raise NotInvertibleError(f"leading coefficient {lcoef} is not a unit of A")
        inv = lcoef.inverse()
        rem_terms = dict(a.terms)
        quot = {}
        out = {}
        dterms = list(d.terms.items())
        while rem_terms:
            e = max(rem_terms, key=order)
            c = rem_terms[e]
            if all(i >= j for i, j in zip(e, lexp)):
                shift = tuple(i - j for i, j in zip(e, lexp))
                f = c * inv
                quot[shift] = quot.get(shift, ZERO_ELEM) + f
                for ed, cd in dterms:
                    t = tuple(i + j for i, j in zip(ed, shift))
                    v = rem_terms.get(t, ZERO_ELEM) - f * cd
                    if v:
                        rem_terms[t] = v
                    else:
                        rem_terms.pop(t, None)
            else:
                out[e] = c
                del rem_terms[e]
        return MPoly(a.vars, quot), MPoly._raw(a.vars, out)

    def exact_div(self, divisor: "MPoly") -> "MPoly":
        q, r = self.divmod(divisor)
        if r:
            raise DivisibilityError(f"{divisor} does not divide {self}")
        return q

    # calculus -------------------------------------------------------------
    def diff(self, var) -> "MPoly":
        if var not in self.vars:
            raise VariableError(f"unknown variable {var!r} (have {self.vars})")
        i = self._index(var)
        terms = {}
        for exps, c in self.terms.items():
            k = exps[i]
            if k:
                terms[exps[:i] + (k - 1,) + exps[i + 1:]] = c * k
        return MPoly._raw(self.vars, terms)

    def integrate(self, var) -> "MPoly":
        """Antiderivative in var with zero constant term in var."""
        if var not in self.vars:
            raise VariableError(f"unknown variable {var!r} (have {self.vars})")
        i = self._index(var)
        terms = {}
        for exps, c in self.terms.items():
            k = exps[i] + 1
            terms[exps[:i] + (k,) + exps[i + 1:]] = c * Fraction(1, k)
        return MPoly._raw(self.vars, terms)

    def subs(self, mapping) -> "MPoly":
        """Ring homomorphism sending each mapped variable to a polynomial or scalar.

        The result lives on the unmapped variables of self followed by any new
        variables of the images.
        """
        for v in mapping:
            if v not in self.vars:
                raise VariableError(f"cannot substitute unknown variable {v!r}")
        keep = tuple(v for v in self.vars if v not in mapping)
        images = {}
        target = list(keep)
        for v, img in mapping.items():
            if isinstance(img, MPoly):
                for w in img.vars:
                    if w not in target:
                        target.append(w)
        target = tuple(target)
        for v, img in mapping.items():
            if isinstance(img, MPoly):
                images[v] = img.with_vars(target)
            else:
                images[v] = MPoly.const(img, target)
        keep_pos = [(target.index(v), self.vars.index(v)) for v in keep]
        mapped = [(self.vars.index(v), images[v]) for v in mapping]
        power_cache = {}

        def pw(i, img, k):
            key = (i, k)
            if key not in power_cache:
                power_cache[key] = img ** k
            return power_cache[key]

        result = MPoly(target)
        n = len(target)
        for exps, c in self.terms.items():
            base = [0] * n
            for j, i in keep_pos:
                base[j] = exps[i]
            term = MPoly._raw(target, {tuple(base): c})
            for i, img in mapped:
                if exps[i]:
                    term = term * pw(i, img, exps[i])
            result = result + term
        return result

    def rename(self, mapping) -> "MPoly":
        return MPoly._raw(_check_vars(tuple(mapping.get(v, v) for v in self.vars)), dict(self.terms))

    # x-adic tools ---------------------------------------------------------
    def residue(self) -> "MPoly":
        """Image modulo x, with rational coefficients."""
        terms = {}
        for e, c in self.terms.items():
            r = c.residue()
            if r:
                terms[e] = BaseElem._raw((r,))
        return MPoly._raw(self.vars, terms)

    def truncate(self, k: int) -> "MPoly":
        """Image in (A/x^k)[vars] with coefficients reduced to polynomials of degree < k."""
        terms = {}
        for e, c in self.terms.items():
            t = c.truncate(k)
            if t:
                terms[e] = t
        return MPoly._raw(self.vars, terms)

    def x_coeff(self, k: int) -> "MPoly":
        """Rational polynomial whose coefficients are the x^k-coefficients of self."""
        terms = {}
        for e, c in self.terms.items():
            r = c.x_coeff(k)
            if r:
                terms[e] = BaseElem._raw((r,))
        return MPoly._raw(self.vars, terms)

    def x_order(self):
        if not self.terms:
            return math.inf
        return min(c.x_order() for c in self.terms.values())

    def is_residue(self) -> bool:
        return all(c.is_constant() for c in self.terms.values())

    def is_x_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.terms.values())

    def x_to_variable(self, name=UNIFORMIZER) -> "MPoly":
        """Rewrite the x-dependence of coefficients as an ordinary variable (first).

        Only for coefficients that are polynomials in x. The resulting
        polynomial has rational coefficients over (name, *vars).
        """
        variables = (name,) + self.vars
        terms = {}
        for e, c in self.terms.items():
            if not c.is_polynomial():
                raise DivisibilityError(f"coefficient {c} is not a polynomial in x")
            for k, r in enumerate(c.num):
                if r:
                    terms[(k,) + e] = BaseElem._raw((r,))
        obj = object.__new__(MPoly)
        obj.vars = variables
        obj.terms = terms
        return obj

    @classmethod
    def from_x_variable(cls, p: "MPoly", name=UNIFORMIZER) -> "MPoly":
        if name not in p.vars:
            return p
        i = p.vars.index(name)
        variables = p.vars[:i] + p.vars[i + 1:]
        out = MPoly(variables)
        for e, c in p.terms.items():
            out = out + MPoly._raw(variables, {e[:i] + e[i + 1:]: c * BaseElem.x(e[i])})
        return out

    def map_coeffs(self, fn) -> "MPoly":
        return MPoly(self.vars, {e: fn(c) for e, c in self.terms.items()})

    # univariate views -----------------------------------------------------
    def to_dense(self, var):
        """Coefficient tuple (low to high) of a rational univariate polynomial."""
        used = self.used_vars()
        if any(v != var for v in used):
            raise VariableError(f"{self} is not univariate in {var!r}")
        if not self.terms:
            return up.ZERO
        deg = self.degree(var) if var in self.vars else 0
        out = [Fraction(0)] * (deg + 1)
        i = self.vars.index(var) if var in self.vars else None
        for e, c in self.terms.items():
            out[e[i] if i is not None else 0] = c.constant()
        return up.trim(out)

    @classmethod
    def from_dense(cls, coeffs, var, variables=None):
        variables = _check_vars(variables if variables is not None else (var,))
        i = variables.index(var)
        n = len(variables)
        terms = {}
        for k, c in enumerate(coeffs):
            if c:
                e = [0] * n
                e[i] = k
                terms[tuple(e)] = BaseElem._raw((Fraction(c),))
        return cls._raw(variables, terms)

    # comparison and printing ------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction, BaseElem)):
            other = MPoly.const(other, self.vars)
        if not isinstance(other, MPoly):
            return NotImplemented
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash(frozenset(self.drop_unused()._named_terms()))

    def _named_terms(self):
        for e, c in self.terms.items():
            yield tuple((v, k) for v, k in zip(self.vars, e) if k), c

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda ec: _grlex_key(ec[0]), reverse=True)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, exps) if k
            )
            if c.is_polynomial():
                for k, r in enumerate(c.num):
                    if r:
                        m = "*".join(s for s in (_xmono(k), mono) if s)
                        parts.append((r, m))
            else:
                # non-polynomial coefficient printed as a single bracketed factor
                parts.append((Fraction(1), f"{c}*{mono}" if mono else str(c)))
        return _join_terms(parts)

    def __repr__(self):
        return f"MPoly({str(self)!r}, {self.vars!r})"


ResiduePoly = MPoly


def poly(text, variables) -> MPoly:
    return parse_poly(text, variables)


def compose_maps(inner, outer):
    """Return m with m[v] = outer-image substituted into inner[v].

    ``inner`` maps variables to polynomials in ``outer``'s source variables.
    """
    return {v: p.subs({w: outer[w] for w in outer if w in p.vars}) for v, p in inner.items()}


# ---------------------------------------------------------------------------
# text grammar

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\*\*|[-+*/^()]))")


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.vars = _check_vars(variables)
        self.tokens = self._tokenize(text)
        self.i = 0

    def _loc(self, pos):
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    def error(self, message, pos):
        line, col = self._loc(pos)
        raise ParseError(message, line, col, self.text)

    def _tokenize(self, text):
        tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if not m:
                self.error(f"unexpected character {text[pos]!r}", pos)
            start = m.start(m.lastindex)
            kind = ("num", "name", "op")[m.lastindex - 1]
            value = m.group(m.lastindex)
            if value == "**":
                self.error("'**' is not an operator, use '^' for powers", start + 1)
            tokens.append((kind, value, start))
            pos = m.end()
        tokens.append(("end", "", len(text)))
        return tokens

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty polynomial", 0)
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.error(f"unexpected token {tok[1]!r}", tok[2])
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            _, op, pos = self.take()
            rhs_pos = self.peek()[2]
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if not rhs.is_constant() or not rhs.constant_term().is_unit():
                    self.error("division is only allowed by units of A (polynomials in x with nonzero constant term)", rhs_pos)
                value = value * rhs.constant_term().inverse()
        return value

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            value = self.unary()
            return -value if tok[1] == "-" else value
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] == "op" and tok[1] == "(":
                self.take()
                exp = self.expr()
                close = self.take()
                if close[1] != ")":
                    self.error("expected ')'", close[2])
                if not exp.is_constant() or exp.constant_term().den != up.ONE or len(exp.constant_term().num) > 1:
                    self.error("exponent must be a non-negative integer", tok[2])
                c = exp.constant_term().constant() if exp else Fraction(0)
                if c.denominator != 1 or c < 0:
                    self.error("exponent must be a non-negative integer", tok[2])
                return base ** int(c)
            if tok[0] != "num":
                self.error("exponent must be a non-negative integer", tok[2])
            self.take()
            return base ** int(tok[1])
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return MPoly.const(int(value), self.vars)
        if kind == "name":
            if value == UNIFORMIZER:
                return MPoly.const(BaseElem.x(), self.vars)
            if value not in self.vars:
                self.error(f"unknown variable {value!r}", pos)
            return MPoly.var(value, self.vars)
        if value == "(":
            inner = self.expr()
            close = self.take()
            if close[1] != ")":
                self.error("expected ')'", close[2])
            return inner
        if kind == "end":
            self.error("unexpected end of input", pos)
        self.error(f"unexpected token {value!r}", pos)


def parse_poly(text, variables) -> MPoly:
    """Parse ``1 + x^2*z``-style text into an MPoly on ``variables``."""
    if not isinstance(text, str):
        raise ParseError(f"expected a polynomial string, got {type(text).__name__}")
    return _Parser(text, variables).parse()


# ---------------------------------------------------------------------------


def comp_inverse_mod_xn(Q: MPoly, n: int, var="y", tau="tau") -> MPoly:
    """Compositional inverse G of Q modulo x^n: G(Q(y)) = y mod x^n.

    Q may carry extra parameter variables (coefficients in A[params]); its
    residue must be c*var with c a nonzero rational. G is returned on
    (tau, params...) with coefficients truncated mod x^n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if var not in Q.vars:
        raise NotInvertibleError(f"{Q} does not involve {var!r}")
    if Q.coeff(var, 0):
        raise NotInvertibleError(f"{Q} has a nonzero constant term in {var!r}")
    params = tuple(v for v in Q.vars if v != var)
    if tau in Q.vars:
        raise VariableError(f"{tau!r} clashes with a variable of Q")
    res = Q.residue()
    lin = res.coeff(var, 1)
    if res != lin * MPoly.var(var, Q.vars) or not lin.is_constant() or not lin:
        raise NotInvertibleError(f"residue of {Q} is not c*{var} with c a nonzero constant")
    c = lin.constant_term().constant()
    target = (tau,) + params
    t = MPoly.var(tau, target)
    G = t * (1 / c)
    y = MPoly.var(var, Q.vars)
    Qn = Q.truncate(n)
    for k in range(1, n):
        err = (G.subs({tau: Qn}) - y).truncate(k + 1)
        if err.x_order() < k:
            raise NotInvertibleError("x-adic iteration lost precision")  # cannot happen for valid input
        e = err.x_coeff(k)
        if not e:
            continue
        h = -e.subs({var: t * (1 / c)}).with_vars(target)
        G = G + h * BaseElem.x(k)
    return G.truncate(n)
