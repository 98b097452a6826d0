"""Best rational approximation via continued fractions.

The rule used throughout the package is the classical one: the best
approximation of x with denominator at most Q is the last continued-fraction
convergent p/q with q <= Q.  It minimizes |q*x - p| over all denominators
up to Q and satisfies |x - p/q| <= 1/(q*Q).  (`Fraction.limit_denominator`
implements a slightly different criterion — minimal |x - p/q| — which may
return a semiconvergent violating that bound, so it is not used here.)
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

from .errors import OutOfRange

__all__ = ["convergents", "best_rational", "as_rational"]


def convergents(x: Fraction) -> Iterator[Fraction]:
    """Yield the continued-fraction convergents of an exact rational x.

    The sequence ends with x itself (every float is exactly rational, so
    feeding `Fraction(some_float)` terminates).
    """
    h_prev, k_prev = 1, 0
    h, k = int(x // 1), 1
    yield Fraction(h, k)
    rem = x - (x // 1)
    while rem != 0:
        x = 1 / rem
        a = int(x // 1)
        rem = x - a
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield Fraction(h, k)


def best_rational(x: float | Fraction, max_den: int) -> Fraction:
    """Best rational approximation of x with denominator <= max_den.

    Minimizes |q*x - p|; equivalently, the last convergent with q <= max_den.
    """
    if max_den < 1:
        raise OutOfRange(f"max_den must be >= 1, got {max_den}")
    xq = Fraction(x)
    best = Fraction(int(xq // 1))
    for c in convergents(xq):
        if c.denominator > max_den:
            break
        best = c
    return best


def as_rational(x: float, max_den: int = 10**6, rel_tol: float = 1e-9) -> Fraction | None:
    """Heuristic rationality test for a float.

    Walks the continued fraction of x and accepts the first convergent p/q
    (q <= max_den) whose error is below rel_tol AND far below the generic
    1/q^2 convergent scale — i.e. the continued fraction "stabilizes" with a
    huge next partial quotient, the signature of a true rational observed
    through floating-point noise.  Genuine irrationals (sqrt(2), pi, the
    golden ratio) keep moderate partial quotients and are rejected.
    """
    xq = Fraction(x)
    scale = max(1.0, abs(x))
    for c in convergents(xq):
        if c.denominator > max_den:
            break
        err = abs(xq - c)
        if err <= rel_tol * scale and err * c.denominator**2 <= Fraction(1, 1000):
            return c
    return None
