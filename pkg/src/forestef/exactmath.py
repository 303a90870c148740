"""Exact arithmetic helpers for bounds that involve rational exponents.

Everything here works on integers and fractions.Fraction only.  Quantities
like c * n**beta with beta = p/q are irrational in general, so direct
comparison is impossible; instead we either clear the exponent (raise both
sides to the q-th power) or produce certified rational enclosures via
integer root extraction.
"""

from __future__ import annotations

from fractions import Fraction


def iroot(x: int, k: int) -> int:
    """Floor of the k-th root of a non-negative integer, by Newton iteration."""
    if x < 0:
        raise ValueError("iroot of negative number")
    if k <= 0:
        raise ValueError("root order must be positive")
    if x in (0, 1) or k == 1:
        return x
    # initial guess from bit length, then damped Newton on integers
    r = 1 << ((x.bit_length() + k - 1) // k)
    while True:
        nr = ((k - 1) * r + x // r ** (k - 1)) // k
        if nr >= r:
            break
        r = nr
    while r ** k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def pow_leq(value: int, coeff: Fraction, base: int, exp: Fraction) -> bool:
    """Exact test for  value <= coeff * base**exp  with exp = p/q rational.

    Both sides are raised to the q-th power, which clears the root:
        value**q * coeff_den**q  <=  coeff_num**q * base**p.
    Requires value >= 0, coeff > 0, base >= 0, 0 < exp.
    """
    if value < 0:
        return True
    p, q = exp.numerator, exp.denominator
    if p <= 0:
        raise ValueError("exponent must be positive")
    lhs = value ** q * coeff.denominator ** q
    rhs = coeff.numerator ** q * base ** p
    return lhs <= rhs


def ceil_log2_fraction(x: Fraction) -> int:
    """Smallest integer k with x <= 2**k, for rational x > 0."""
    if x <= 0:
        raise ValueError("ceil_log2 of non-positive value")
    p, q = x.numerator, x.denominator
    k = p.bit_length() - q.bit_length()
    # p/q <= 2**k  <=>  p <= q * 2**k  (k may be negative)
    def le(k: int) -> bool:
        if k >= 0:
            return p <= q << k
        return p << (-k) <= q
    while le(k - 1):
        k -= 1
    while not le(k):
        k += 1
    return k


def ceil_log2_power(coeff: Fraction, base: int, exp: Fraction) -> int:
    """Smallest integer k with coeff * base**exp <= 2**k, all exact.

    coeff > 0 rational, base >= 1 integer, exp = p/q > 0 rational.
    The comparison coeff * base**(p/q) <= 2**k is decided by raising to
    the q-th power: coeff_num**q * base**p <= coeff_den**q * 2**(k*q).
    """
    if coeff <= 0 or base < 1:
        raise ValueError("need coeff > 0 and base >= 1")
    p, q = exp.numerator, exp.denominator
    a = coeff.numerator ** q * base ** p
    b = coeff.denominator ** q

    def le(k: int) -> bool:
        # a <= b * 2**(k*q), with k possibly negative
        kq = k * q
        if kq >= 0:
            return a <= b << kq
        return a << (-kq) <= b
    k = (a.bit_length() - b.bit_length()) // max(q, 1) + 2
    while le(k - 1):
        k -= 1
    while not le(k):
        k += 1
    return k


def pow_bounds(coeff: Fraction, base: int, exp: Fraction, digits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure lo <= coeff * base**exp <= hi with ~`digits` decimals.

    base >= 0 integer, exp = p/q >= 0.  Uses integer q-th roots of a scaled
    power, so the enclosure is exact arithmetic throughout.
    """
    p, q = exp.numerator, exp.denominator
    if base < 0 or p < 0:
        raise ValueError("need base >= 0 and exp >= 0")
    if base == 0:
        v = coeff * (1 if p == 0 else 0)
        return (v, v)
    scale = 10 ** digits
    # floor(scale * base**(p/q)) via integer root: r = floor((scale**q * base**p)**(1/q))
    r = iroot(scale ** q * base ** p, q)
    lo = Fraction(r, scale)
    hi = Fraction(r + 1, scale)
    if coeff >= 0:
        return (coeff * lo, coeff * hi)
    return (coeff * hi, coeff * lo)


def pow2_bounds(exp: Fraction, digits: int) -> tuple[Fraction, Fraction]:
    """Certified enclosure of 2**exp for rational exp >= 0."""
    if exp.denominator == 1:
        v = Fraction(2 ** exp.numerator)
        return (v, v)
    return pow_bounds(Fraction(1), 2, exp, digits)
