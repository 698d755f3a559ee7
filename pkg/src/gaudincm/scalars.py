"""Scalar arithmetic for the two interchangeable matrix modes.

Float mode uses plain Python complex.  Exact mode uses ExactScalar, the
field Q(sqrt2, i) with Fraction components: the sqrt2 is unavoidable
because the B-type coupling preset is (sqrt2*hbar, hbar, 0), and the i
covers Gaussian-rational inputs.  Plain int/Fraction values interoperate
with ExactScalar, so code that never touches sqrt2 stays on the fast
rational path.
"""
from __future__ import annotations

import cmath
from fractions import Fraction
from numbers import Complex

_FRAC_TYPES = (int, Fraction)


def is_exact(x) -> bool:
    """True if x belongs to the exact scalar family."""
    if isinstance(x, bool):
        return False
    return isinstance(x, _FRAC_TYPES) or isinstance(x, ExactScalar)


def exact_mode(*values) -> bool:
    """True when every value is exact (the all-exact convention)."""
    return all(is_exact(v) for v in values)


def to_complex(x) -> complex:
    if isinstance(x, ExactScalar):
        return x.to_complex()
    return complex(x)


_SQRT2 = 2.0 ** 0.5


def sqrt2_scalar(exact: bool):
    """sqrt(2) in the requested scalar mode."""
    return ExactScalar.sqrt2() if exact else _SQRT2


def half_scalar(exact: bool):
    return Fraction(1, 2) if exact else 0.5


class ExactScalar:
    """a + b*sqrt2 + (c + d*sqrt2)*i with Fraction components."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a=0, b=0, c=0, d=0):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)

    @classmethod
    def sqrt2(cls) -> "ExactScalar":
        return cls(0, 1)

    @classmethod
    def imag_unit(cls) -> "ExactScalar":
        return cls(0, 0, 1)

    @classmethod
    def coerce(cls, x) -> "ExactScalar":
        if isinstance(x, cls):
            return x
        if isinstance(x, _FRAC_TYPES):
            return cls(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to ExactScalar")

    @property
    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self!r} is not rational")
        return self.a

    def to_complex(self) -> complex:
        return complex(self.a + self.b * _SQRT2, self.c + self.d * _SQRT2)

    def components(self):
        return (self.a, self.b, self.c, self.d)

    def __bool__(self):
        return bool(self.a or self.b or self.c or self.d)

    def __eq__(self, other):
        if isinstance(other, _FRAC_TYPES):
            other = ExactScalar(other)
        if isinstance(other, ExactScalar):
            return self.components() == other.components()
        return NotImplemented

    def __hash__(self):
        if self.is_rational:
            return hash(self.a)
        return hash(self.components())

    def __neg__(self):
        return ExactScalar(-self.a, -self.b, -self.c, -self.d)

    def __pos__(self):
        return self

    def __add__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return ExactScalar(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def __rsub__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        a0, a1, a2, a3 = self.components()
        b0, b1, b2, b3 = o.components()
        return ExactScalar(
            a0 * b0 + 2 * a1 * b1 - a2 * b2 - 2 * a3 * b3,
            a0 * b1 + a1 * b0 - a2 * b3 - a3 * b2,
            a0 * b2 + a2 * b0 + 2 * (a1 * b3 + a3 * b1),
            a0 * b3 + a3 * b0 + a1 * b2 + a2 * b1,
        )

    __rmul__ = __mul__

    def _inverse(self) -> "ExactScalar":
        # 1/(x + y*i) = (x - y*i)/(x^2 + y^2), all in Q(sqrt2).
        x = (self.a, self.b)
        y = (self.c, self.d)
        u = (x[0] * x[0] + 2 * x[1] * x[1] + y[0] * y[0] + 2 * y[1] * y[1],
             2 * x[0] * x[1] + 2 * y[0] * y[1])
        den = u[0] * u[0] - 2 * u[1] * u[1]
        if den == 0:
            raise ZeroDivisionError("division by zero ExactScalar")
        iu = (u[0] / den, -u[1] / den)
        conj = ExactScalar(x[0], x[1], -y[0], -y[1])
        return conj * ExactScalar(iu[0], iu[1])

    def __truediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o._inverse()

    def __rtruediv__(self, other):
        try:
            o = ExactScalar.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self._inverse()

    def __abs__(self):
        return abs(self.to_complex())

    def __repr__(self):
        return f"ExactScalar({self.a}, {self.b}, {self.c}, {self.d})"


def scalar_div(x, y):
    """x / y keeping int/int exact (Fractions instead of floats)."""
    if isinstance(x, int) and isinstance(y, int):
        return Fraction(x, y)
    if isinstance(x, _FRAC_TYPES) and isinstance(y, ExactScalar):
        return ExactScalar(x) / y
    return x / y


def scalar_eq(x, y) -> bool:
    """Exact equality across the int/Fraction/ExactScalar family."""
    if isinstance(x, ExactScalar) or isinstance(y, ExactScalar):
        return ExactScalar.coerce(x) == ExactScalar.coerce(y)
    return x == y


class EpsSeries:
    """Truncated power series a0 + a1*eps + a2*eps^2 over exact scalars.

    Degree-2 jets are enough to read off the Gaudin limit of the transfer
    matrix exactly; division requires an invertible constant term.
    """

    __slots__ = ("a0", "a1", "a2")

    def __init__(self, a0=0, a1=0, a2=0):
        self.a0 = a0
        self.a1 = a1
        self.a2 = a2

    @classmethod
    def coerce(cls, x) -> "EpsSeries":
        if isinstance(x, cls):
            return x
        if is_exact(x):
            return cls(x, 0, 0)
        raise TypeError(f"cannot coerce {type(x).__name__} to EpsSeries")

    def __eq__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return (scalar_eq(self.a0, o.a0) and scalar_eq(self.a1, o.a1)
                and scalar_eq(self.a2, o.a2))

    def __bool__(self):
        return bool(self.a0) or bool(self.a1) or bool(self.a2)

    def __neg__(self):
        return EpsSeries(-self.a0, -self.a1, -self.a2)

    def __add__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return EpsSeries(self.a0 + o.a0, self.a1 + o.a1, self.a2 + o.a2)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return EpsSeries(self.a0 - o.a0, self.a1 - o.a1, self.a2 - o.a2)

    def __rsub__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return o.__sub__(self)

    def __mul__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return EpsSeries(
            self.a0 * o.a0,
            self.a0 * o.a1 + self.a1 * o.a0,
            self.a0 * o.a2 + self.a1 * o.a1 + self.a2 * o.a0,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        c0 = scalar_div(self.a0, o.a0)
        c1 = scalar_div(self.a1 - c0 * o.a1, o.a0)
        c2 = scalar_div(self.a2 - c0 * o.a2 - c1 * o.a1, o.a0)
        return EpsSeries(c0, c1, c2)

    def __rtruediv__(self, other):
        try:
            o = EpsSeries.coerce(other)
        except TypeError:
            return NotImplemented
        return o.__truediv__(self)

    def __repr__(self):
        return f"EpsSeries({self.a0!r}, {self.a1!r}, {self.a2!r})"


def magnitude(x) -> float:
    """|x| as a float, for reporting and pivot choice in either mode."""
    if isinstance(x, ExactScalar):
        return abs(x.to_complex())
    if isinstance(x, Complex):
        return abs(x)
    return abs(float(x))
