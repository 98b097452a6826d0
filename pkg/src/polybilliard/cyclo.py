"""Exact arithmetic in the cyclotomic field Q(zeta_M).

Elements are stored in the tensor basis coming from the prime-power
factorization M = q_1 * ... * q_r (q_i = p_i^e_i): a basis monomial is a
tuple (a_1, ..., a_r) with 0 <= a_i < phi(q_i), standing for the product of
zeta_{q_i}^{a_i}.  This basis is canonical — an element is zero if and only
if its coefficient dict is empty — which is what makes exact geometric
predicates (closure, collinearity, rationality of period ratios) decidable.

A planar vector is represented by a single field element z = x + i*y, so the
whole 2D geometry of the package reduces to field arithmetic.  The field
order used downstream is always M = 4N, which keeps i = zeta^{M/4} and all
side directions e^{i*pi*j/N} = zeta^{2j} exactly representable.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from itertools import product

from .errors import OutOfRange
from .ratlinalg import solve_square

__all__ = ["CycloField", "Cyclo", "prime_power_factors"]


def prime_power_factors(m: int) -> list[tuple[int, int]]:
    """Factor m into prime powers: returns [(p, p^e), ...] in increasing p."""
    out = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            q = 1
            while m % p == 0:
                m //= p
                q *= p
            out.append((p, q))
        p += 1
    if m > 1:
        out.append((m, m))
    return out


class CycloField:
    """The field Q(zeta_M) with cached monomial tables.

    Instances are cached by M; arithmetic on elements of different fields is
    rejected rather than coerced.
    """

    _instances: dict[int, "CycloField"] = {}

    def __new__(cls, m: int):
        if m < 1:
            raise OutOfRange(f"field order must be >= 1, got {m}")
        inst = cls._instances.get(m)
        if inst is None:
            inst = super().__new__(cls)
            inst._init(m)
            cls._instances[m] = inst
        return inst

    def _init(self, m: int) -> None:
        self.order = m
        facs = prime_power_factors(m)
        self.primes = [p for p, _ in facs]
        self.moduli = [q for _, q in facs]
        self.phis = [q - q // p for p, q in facs]
        self.degree = 1
        for ph in self.phis:
            self.degree *= ph
        # CRT weights: zeta_M^j  <->  prod_i zeta_{q_i}^{j * u_i mod q_i}
        self.crt_units = [pow(m // q, -1, q) for q in self.moduli]
        self._reduce_cache: dict[tuple[int, ...], list[tuple[tuple[int, ...], int]]] = {}
        self._value_cache: dict[tuple[int, ...], complex] = {}
        self.zero_key = (0,) * len(self.moduli)

    # -- monomial plumbing ------------------------------------------------

    def _raw_key(self, j: int) -> tuple[int, ...]:
        return tuple((j * u) % q for q, u in zip(self.moduli, self.crt_units))

    def _expand_component(self, i: int, a: int) -> list[tuple[int, int]]:
        """Rewrite zeta_{q_i}^a on the basis exponents [0, phi(q_i))."""
        if a < self.phis[i]:
            return [(a, 1)]
        # zeta^(phi(q)+r) = -sum_t zeta^(t*q/p + r), t = 0..p-2
        p, q = self.primes[i], self.moduli[i]
        r = a - self.phis[i]
        return [(t * (q // p) + r, -1) for t in range(p - 1)]

    def _reduce_raw(self, key: tuple[int, ...]) -> list[tuple[tuple[int, ...], int]]:
        """Expand a raw monomial (components < q_i) over the canonical basis."""
        hit = self._reduce_cache.get(key)
        if hit is not None:
            return hit
        terms: list[tuple[tuple[int, ...], int]] = [((), 1)]
        for i, a in enumerate(key):
            comp = self._expand_component(i, a)
            terms = [(prefix + (b,), s * t) for prefix, s in terms for b, t in comp]
        self._reduce_cache[key] = terms
        return terms

    def _monomial_value(self, key: tuple[int, ...]) -> complex:
        v = self._value_cache.get(key)
        if v is None:
            phase = sum(Fraction(a, q) for a, q in zip(key, self.moduli))
            v = cmath.exp(2j * cmath.pi * float(phase))
            self._value_cache[key] = v
        return v

    # -- element constructors ---------------------------------------------

    def element(self, coeffs: dict[tuple[int, ...], Fraction]) -> "Cyclo":
        return Cyclo(self, coeffs)

    def zero(self) -> "Cyclo":
        return Cyclo(self, {})

    def one(self) -> "Cyclo":
        return self.rational(1)

    def rational(self, q) -> "Cyclo":
        q = Fraction(q)
        return Cyclo(self, {self.zero_key: q} if q else {})

    def zeta(self, j: int = 1) -> "Cyclo":
        """The root of unity zeta_M^j."""
        acc: dict[tuple[int, ...], Fraction] = {}
        for key, sign in self._reduce_raw(self._raw_key(j)):
            acc[key] = acc.get(key, Fraction(0)) + sign
        return Cyclo(self, {k: v for k, v in acc.items() if v})

    def i(self) -> "Cyclo":
        if self.order % 4:
            raise OutOfRange(f"sqrt(-1) requires 4 | M, field has M={self.order}")
        return self.zeta(self.order // 4)

    def __repr__(self) -> str:
        return f"CycloField({self.order})"


class Cyclo:
    """An element of Q(zeta_M); immutable, canonically normalized."""

    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: CycloField, coeffs: dict[tuple[int, ...], Fraction]):
        self.field = field
        self.coeffs = coeffs
        self._hash: int | None = None

    # -- ring structure ----------------------------------------------------

    def _coerce(self, other) -> "Cyclo | None":
        if isinstance(other, Cyclo):
            if other.field is not self.field:
                raise ValueError("mixed cyclotomic fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.rational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.coeffs)
        for k, v in o.coeffs.items():
            s = out.get(k, Fraction(0)) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Cyclo(self.field, out)

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.field, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        moduli = self.field.moduli
        acc: dict[tuple[int, ...], Fraction] = {}
        for ka, va in self.coeffs.items():
            for kb, vb in o.coeffs.items():
                raw = tuple((a + b) % q for a, b, q in zip(ka, kb, moduli))
                c = va * vb
                for key, sign in self.field._reduce_raw(raw):
                    s = acc.get(key, Fraction(0)) + (c if sign > 0 else -c)
                    if s:
                        acc[key] = s
                    else:
                        acc.pop(key, None)
        return Cyclo(self.field, acc)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            inv = Fraction(1, 1) / Fraction(other)
            return Cyclo(self.field, {k: v * inv for k, v in self.coeffs.items()})
        if isinstance(other, Cyclo):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.field.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- field-specific operations ------------------------------------------

    def shift(self, j: int) -> "Cyclo":
        """Multiply by zeta_M^j (a rotation by 2*pi*j/M when read as a planar vector)."""
        moduli = self.field.moduli
        kj = self.field._raw_key(j % self.field.order)
        acc: dict[tuple[int, ...], Fraction] = {}
        for ka, va in self.coeffs.items():
            raw = tuple((a + b) % q for a, b, q in zip(ka, kj, moduli))
            for key, sign in self.field._reduce_raw(raw):
                s = acc.get(key, Fraction(0)) + (va if sign > 0 else -va)
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return Cyclo(self.field, acc)

    def conj(self) -> "Cyclo":
        """Complex conjugation: zeta -> zeta^(-1) componentwise."""
        moduli = self.field.moduli
        acc: dict[tuple[int, ...], Fraction] = {}
        for ka, va in self.coeffs.items():
            raw = tuple((q - a) % q for a, q in zip(ka, moduli))
            for key, sign in self.field._reduce_raw(raw):
                s = acc.get(key, Fraction(0)) + (va if sign > 0 else -va)
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return Cyclo(self.field, acc)

    def re(self) -> "Cyclo":
        return (self + self.conj()) / 2

    def im(self) -> "Cyclo":
        # (z - conj z)/2 = i * Im z; multiply by -i = zeta^(-M/4)
        if self.field.order % 4:
            raise OutOfRange("im() requires 4 | M")
        return ((self - self.conj()) / 2).shift(-(self.field.order // 4))

    # -- predicates and conversions -----------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def is_rational(self) -> bool:
        return all(k == self.field.zero_key for k in self.coeffs)

    def as_fraction(self) -> Fraction:
        if not self.is_rational():
            raise OutOfRange(f"not a rational number: {self!r}")
        return self.coeffs.get(self.field.zero_key, Fraction(0))

    def __complex__(self) -> complex:
        return sum(
            (float(v) * self.field._monomial_value(k) for k, v in self.coeffs.items()),
            complex(0),
        )

    def __float__(self) -> float:
        z = complex(self)
        if abs(z.imag) > 1e-9 * (1.0 + abs(z.real)):
            raise OutOfRange(f"float() of a non-real element: {self!r}")
        return z.real

    def inverse(self) -> "Cyclo":
        """Multiplicative inverse via an exact linear solve of w -> self*w = 1."""
        if not self.coeffs:
            raise ZeroDivisionError("inverse of zero")
        fld = self.field
        basis = [tuple(k) for k in product(*(range(ph) for ph in fld.phis))]
        index = {k: i for i, k in enumerate(basis)}
        n = len(basis)
        mat = [[Fraction(0)] * n for _ in range(n)]
        for col, bk in enumerate(basis):
            prod_elt = self * Cyclo(fld, {bk: Fraction(1)})
            for k, v in prod_elt.coeffs.items():
                mat[index[k]][col] = v
        rhs = [Fraction(0)] * n
        rhs[index[fld.zero_key]] = Fraction(1)
        sol = solve_square(mat, rhs)  # always solvable: nonzero element of a field
        return Cyclo(fld, {k: sol[i] for i, k in enumerate(basis) if sol[i]})

    # -- equality -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.field.rational(other)
        if not isinstance(other, Cyclo) or other.field is not self.field:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Cyclo(0)"
        parts = [f"{v}*z{k}" for k, v in sorted(self.coeffs.items())]
        return f"Cyclo[{self.field.order}](" + " + ".join(parts) + ")"
