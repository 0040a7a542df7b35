"""Exact arithmetic on logarithms of rationals.

log(q) for rational q is written as sum e_p log p over primes.  Logs of
distinct primes are taken as algebraically independent, so two expressions
are equal iff their rational functions in the symbols L_p agree.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import mpmath
import sympy

__all__ = ["log_expr", "log_ratio", "exact_equal", "display", "evaluate", "compare_log_ratios",
           "MAX_FACTOR_DIGITS"]

MAX_FACTOR_DIGITS = 40


@lru_cache(maxsize=None)
def _prime_symbol(p: int) -> sympy.Symbol:
    return sympy.Symbol(f"L{p}", positive=True)


def _factor(n: int) -> dict:
    if len(str(n)) > MAX_FACTOR_DIGITS:
        raise OverflowError(f"refusing to factor a {len(str(n))}-digit integer")
    return sympy.factorint(n)


def log_expr(q) -> sympy.Expr:
    """log(q) as an integer combination of prime-log symbols."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("log of a nonpositive rational")
    out = sympy.Integer(0)
    for p, e in _factor(q.numerator).items():
        out += e * _prime_symbol(p)
    for p, e in _factor(q.denominator).items():
        out -= e * _prime_symbol(p)
    return out


def log_ratio(a, b) -> sympy.Expr:
    """log(a) / log(b)."""
    den = log_expr(b)
    if den == 0:
        raise ZeroDivisionError("log(1) in the denominator")
    return log_expr(a) / den


def exact_equal(x: sympy.Expr, y: sympy.Expr) -> bool:
    return sympy.cancel(sympy.together(sympy.sympify(x) - sympy.sympify(y))) == 0


def _to_logs(expr):
    subs = {s: sympy.log(int(s.name[1:]), evaluate=False) for s in sympy.sympify(expr).free_symbols}
    return sympy.sympify(expr).subs(subs)


def display(expr) -> str:
    """Readable form, e.g. ``log(4)/log(3)`` appears as ``2*log(2)/log(3)``."""
    return str(_to_logs(sympy.simplify(expr)))


def evaluate(expr, digits: int = 30) -> float:
    with mpmath.workdps(digits):
        subs = {s: mpmath.log(int(s.name[1:])) for s in sympy.sympify(expr).free_symbols}
        return float(sympy.sympify(expr).evalf(digits, subs=subs))


def compare_log_ratios(a, b, c, d, digits: int = 60) -> int:
    """Sign of log a / log b - log c / log d for rationals, by high-precision evaluation.

    Exact ties are recognized through the prime-log expansion when the
    integers are small enough to factor.
    """
    with mpmath.workdps(digits):
        u = mpmath.log(mpmath.mpf(Fraction(a).numerator) / Fraction(a).denominator)
        v = mpmath.log(mpmath.mpf(Fraction(b).numerator) / Fraction(b).denominator)
        s = mpmath.log(mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator)
        t = mpmath.log(mpmath.mpf(Fraction(d).numerator) / Fraction(d).denominator)
        diff = u / v - s / t
        if abs(diff) > mpmath.mpf(10) ** (-(digits - 10)):
            return 1 if diff > 0 else -1
    try:
        if exact_equal(log_ratio(a, b), log_ratio(c, d)):
            return 0
    except OverflowError:
        pass
    return 1 if diff > 0 else (-1 if diff < 0 else 0)
