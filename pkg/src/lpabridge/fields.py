"""Exact scalar arithmetic: rationals by default, prime fields GF(p) on request.

Scalars are ordinary value objects supporting ``+ - * /`` and truth testing
(zero is falsy), so the rest of the package is field-agnostic.  A field
object is only needed where scalars are created from nothing (units,
parsing) or rendered to text.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class FieldError(ValueError):
    """Raised for mixed-field arithmetic or unparseable scalars."""


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class PrimeFieldElement:
    """An element of GF(p), stored as its canonical representative in [0, p)."""

    value: int
    p: int

    def _coerce(self, other: "PrimeFieldElement") -> "PrimeFieldElement":
        if not isinstance(other, PrimeFieldElement) or other.p != self.p:
            raise FieldError(f"cannot combine GF({self.p}) element with {other!r}")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return PrimeFieldElement((self.value + other.value) % self.p, self.p)

    def __sub__(self, other):
        other = self._coerce(other)
        return PrimeFieldElement((self.value - other.value) % self.p, self.p)

    def __mul__(self, other):
        other = self._coerce(other)
        return PrimeFieldElement((self.value * other.value) % self.p, self.p)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.value == 0:
            raise ZeroDivisionError(f"division by zero in GF({self.p})")
        inv = pow(other.value, self.p - 2, self.p)
        return PrimeFieldElement((self.value * inv) % self.p, self.p)

    def __neg__(self):
        return PrimeFieldElement((-self.value) % self.p, self.p)

    def __bool__(self):
        return self.value != 0


@dataclass(frozen=True)
class RationalField:
    """The rationals with arbitrary-precision integer numerator/denominator."""

    name: str = "rational"

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, x) -> Fraction:
        return Fraction(x)

    def parse(self, s: str) -> Fraction:
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse rational scalar {s!r}") from exc

    def format(self, a: Fraction) -> str:
        return str(a)


@dataclass(frozen=True)
class PrimeField:
    """GF(p) for a prime p."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise FieldError(f"GF({self.p}) requested but {self.p} is not prime")

    @property
    def name(self) -> str:
        return f"gfp:{self.p}"

    @property
    def zero(self) -> PrimeFieldElement:
        return PrimeFieldElement(0, self.p)

    @property
    def one(self) -> PrimeFieldElement:
        return PrimeFieldElement(1, self.p)

    def coerce(self, x) -> PrimeFieldElement:
        if isinstance(x, PrimeFieldElement):
            if x.p != self.p:
                raise FieldError(f"GF({x.p}) element given to GF({self.p})")
            return x
        return PrimeFieldElement(int(x) % self.p, self.p)

    def parse(self, s: str) -> PrimeFieldElement:
        try:
            return self.coerce(int(s))
        except ValueError as exc:
            raise FieldError(f"cannot parse GF({self.p}) scalar {s!r}") from exc

    def format(self, a: PrimeFieldElement) -> str:
        return str(self.coerce(a).value)


Rationals = RationalField()


def field_from_name(name: str):
    """Resolve a field spec string: ``rational`` or ``gfp:<p>``."""
    if name == "rational":
        return Rationals
    if name.startswith("gfp:"):
        try:
            p = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise FieldError(f"bad field spec {name!r}") from exc
        return PrimeField(p)
    raise FieldError(f"unknown field {name!r} (expected 'rational' or 'gfp:<p>')")
