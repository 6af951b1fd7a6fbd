"""Independent sympy oracles. Nothing here touches python-flint."""

from fractions import Fraction

import sympy

x, t = sympy.symbols("x t")


def sym(text: str):
    """Parse the `(num) / (den) + O(t^N)` text form; returns (expr, N or None)."""
    prec = None
    if "+ O(t^" in text:
        text, tail = text.rsplit("+ O(t^", 1)
        prec = int(tail.rstrip(")"))
    return sympy.sympify(text.replace("^", "**"), locals={"x": x, "t": t}), prec


def t_coefficients(expr, t_prec: int):
    """Taylor coefficients in t as rational functions of x."""
    ser = sympy.series(expr, t, 0, t_prec).removeO()
    return [sympy.cancel(ser.coeff(t, i)) for i in range(t_prec)]


def laurent_terms(r, x_hi: int) -> dict:
    """{e: c} for x^e with e < x_hi in the Laurent expansion at x = 0."""
    r = sympy.cancel(r)
    if r == 0:
        return {}
    num, den = sympy.fraction(r)
    v = 0
    dp = sympy.Poly(den, x)
    while dp.eval(0) == 0:
        dp = sympy.Poly(sympy.quo(dp.as_expr(), x), x)
        v += 1
    n = max(x_hi + v, 1)
    ser = sympy.series(num / dp.as_expr(), x, 0, n).removeO()
    out = {}
    for k in range(n):
        c = ser.coeff(x, k)
        if c != 0 and k - v < x_hi:
            out[k - v] = Fraction(int(c.p), int(c.q))
    return out


def expansion(expr, t_prec: int, x_hi: int) -> dict:
    """{(i, e): c} for the t-adic then x-adic expansion of expr."""
    out = {}
    for i, c in enumerate(t_coefficients(expr, t_prec)):
        for e, v in laurent_terms(c, x_hi).items():
            out[(i, e)] = v
    return out


def series_terms(s, x_hi: int) -> dict:
    """Same layout from a TruncatedSeries, restricted to e < x_hi."""
    return {(i, e): Fraction(int(c.p), int(c.q)) for i, e, c in s.terms() if e < x_hi and c != 0}


def laurent_poly(s):
    """Exact TruncatedSeries -> sympy polynomial in t, x, 1/x."""
    out = 0
    for i, e, c in s.terms():
        out += sympy.Rational(int(c.p), int(c.q)) * t**i * x**e
    return out
