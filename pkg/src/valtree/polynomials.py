"""Exact univariate polynomial arithmetic over Q and the base p-adic valuation.

Coefficients are stored lowest degree first; the zero polynomial has an
empty coefficient tuple and a ``None`` degree rather than any number.
No operation ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .ordered_values import INFINITY, GroupValue, RationalLike, _as_fraction


@dataclass(frozen=True)
class Poly:
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(_as_fraction(c) for c in self.coeffs)
        while coeffs and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def from_coeffs(coeffs: Iterable[RationalLike]) -> "Poly":
        return Poly(tuple(coeffs))

    @staticmethod
    def constant(c: RationalLike) -> "Poly":
        return Poly((c,))

    @staticmethod
    def zero() -> "Poly":
        return Poly(())

    @staticmethod
    def one() -> "Poly":
        return Poly((1,))

    @staticmethod
    def variable() -> "Poly":
        return Poly((0, 1))

    @staticmethod
    def monomial(k: int, c: RationalLike = 1) -> "Poly":
        return Poly((0,) * k + (c,))

    # -- structure ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> Optional[int]:
        """Degree, or None for the zero polynomial (a marker, never a number)."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("the zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    @property
    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __sub__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(tuple(self.coeff(i) - other.coeff(i) for i in range(n)))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return Poly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    def scale(self, c: RationalLike) -> "Poly":
        c = _as_fraction(c)
        return Poly(tuple(c * a for a in self.coeffs))

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative polynomial powers are not defined")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def quo_rem(self, other: "Poly") -> Tuple["Poly", "Poly"]:
        """Euclidean division; exact over Q for any nonzero divisor."""
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        d = other.degree
        lead = other.leading
        quo = [Fraction(0)] * max(len(rem) - d, 0)
        for i in range(len(rem) - 1, d - 1, -1):
            c = rem[i] / lead
            if c == 0:
                continue
            quo[i - d] = c
            for j, b in enumerate(other.coeffs):
                rem[i - d + j] -= c * b
        return Poly(tuple(quo)), Poly(tuple(rem[:d] if d > 0 else ()))

    def compose(self, inner: "Poly") -> "Poly":
        """Substitution self(inner(x)), computed by Horner's rule."""
        result = Poly(())
        for c in reversed(self.coeffs):
            result = result * inner + Poly.constant(c)
        return result

    def __call__(self, point: RationalLike) -> Fraction:
        point = _as_fraction(point)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    # -- rendering ------------------------------------------------------------

    def render(self, var: str = "x") -> str:
        if self.is_zero:
            return "0"
        parts: List[str] = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                head = var if k == 1 else f"{var}^{k}"
                body = head if mag == 1 else f"{mag}*{head}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"{sign}{body}")
        return "".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"Poly({self.render()})"


X = Poly.variable()


def q_expansion(f: Poly, q: Poly) -> List[Poly]:
    """Coefficients of f written in base q: f = sum f_j q^j with deg f_j < deg q.

    Unique by repeated Euclidean division; q must be monic and non-constant.
    """
    if not q.is_monic:
        raise ValueError(f"expansion base must be monic, got {q}")
    if q.is_constant:
        raise ValueError(f"expansion base must be non-constant, got {q}")
    if f.is_zero:
        return [Poly.zero()]
    parts: List[Poly] = []
    rest = f
    while not rest.is_zero:
        rest, digit = rest.quo_rem(q)
        parts.append(digit)
    return parts


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def padic_order(p: int, a: RationalLike) -> Optional[Fraction]:
    """Exponent of p in a, or None for a = 0."""
    a = _as_fraction(a)
    if a == 0:
        return None
    count = 0
    num, den = a.numerator, a.denominator
    while num % p == 0:
        num //= p
        count += 1
    while den % p == 0:
        den //= p
        count -= 1
    return Fraction(count)


def base_val(p: int, a: RationalLike) -> GroupValue:
    """The p-adic valuation of a rational, as a rank-1 value; v(0) is the top."""
    if not _is_prime(p):
        raise ValueError(f"{p} is not prime")
    order = padic_order(p, a)
    if order is None:
        return INFINITY
    return GroupValue(order)
