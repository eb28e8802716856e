"""Dense univariate polynomials over Q.

A polynomial is a tuple of Fractions, lowest degree first, with no trailing
zeros; the zero polynomial is the empty tuple.
"""

from fractions import Fraction

ZERO = ()
ONE = (Fraction(1),)


def trim(coeffs):
    coeffs = [c if type(c) is Fraction else Fraction(c) for c in coeffs]
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return tuple(coeffs)


def const(c):
    return trim((c,))


def degree(p):
    return len(p) - 1


def lc(p):
    return p[-1] if p else Fraction(0)


def add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def neg(a):
    return tuple(-c for c in a)


def sub(a, b):
    return add(a, neg(b))


def scale(a, c):
    if c == 0:
        return ZERO
    return tuple(v * c for v in a)


def mul(a, b):
    if not a or not b:
        return ZERO
    if len(a) == 1:
        return scale(b, a[0])
    if len(b) == 1:
        return scale(a, b[0])
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] += ca * cb
    return trim(out)


def power(a, k):
    result = ONE
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        k >>= 1
        if k:
            base = mul(base, base)
    return result


def divmod_(a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a)
    db = degree(b)
    inv = 1 / b[-1]
    quot = [Fraction(0)] * max(len(a) - db, 0)
    for k in range(len(a) - 1 - db, -1, -1):
        c = rem[k + db] * inv
        if c:
            quot[k] = c
            for j, cb in enumerate(b):
                rem[k + j] -= c * cb
    return trim(quot), trim(rem[:db] if db > 0 else [])


def monic(a):
    if not a:
        return ZERO
    return scale(a, 1 / a[-1])


def gcd(a, b):
    """Monic gcd; gcd(0, 0) is 0."""
    while b:
        a, b = b, divmod_(a, b)[1]
    return monic(a)


def deriv(a):
    return trim(c * i for i, c in enumerate(a))[1:] if len(a) > 1 else ZERO


def evaluate(a, v):
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * v + c
    return acc


def compose(a, b):
    """a(b(x))."""
    acc = ZERO
    for c in reversed(a):
        acc = add(mul(acc, b), const(c))
    return acc


def x_order(a):
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("order of zero")


def series_inverse(a, k):
    """Power series inverse of a (a[0] != 0) truncated mod x^k."""
    if k <= 0:
        return ZERO
    inv0 = 1 / a[0]
    out = [inv0]
    for m in range(1, k):
        acc = Fraction(0)
        for i in range(1, min(m, len(a) - 1) + 1):
            acc += a[i] * out[m - i]
        out.append(-acc * inv0)
    return trim(out)


def truncate(a, k):
    return trim(a[:k])
