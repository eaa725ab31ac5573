"""Univariate polynomials over exact rationals or tolerant floats.

Coefficients are stored ascending (index k holds the coefficient of x^k)
with the leading coefficient nonzero, so the zero polynomial is the empty
tuple and its degree is the sentinel ``None``.

Two coefficient modes exist and never mix within one computation:

* ``exact``    -- ``fractions.Fraction`` arithmetic, no rounding anywhere.
* ``tolerant`` -- float arithmetic; a coefficient counts as zero when its
  magnitude is at most ``eps_zero`` times the largest magnitude in the
  enclosing polynomial (or an explicitly supplied reference scale).

Matrix reduction and the extended GCD live on top of this module and rely
on ``chop`` to strip cancellation noise in tolerant mode.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import DegenerateInput

EXACT = "exact"
TOLERANT = "tolerant"
DEFAULT_EPS_ZERO = 1e-9

_TERM_RE = re.compile(
    r"""(?P<sign>[+-])?
        (?P<coeff>(?:\d+/\d+)|(?:(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?))?
        (?:\*?(?P<var>x)(?:\^(?P<exp>\d+))?)?""",
    re.VERBOSE,
)


def _coerce(value, mode):
    if mode == EXACT:
        if isinstance(value, Fraction):
            return value
        return Fraction(value)
    if isinstance(value, str):
        # accept p/q strings in both modes so sources stay interchangeable
        return float(Fraction(value))
    return float(value)


def _check_same_mode(a, b):
    if a.mode != b.mode:
        raise DegenerateInput(
            "cannot mix coefficient modes: %s vs %s" % (a.mode, b.mode)
        )


class Polynomial:
    """Immutable univariate polynomial in one of the two coefficient modes."""

    __slots__ = ("coeffs", "mode", "eps_zero")

    def __init__(self, coeffs=(), mode=EXACT, eps_zero=None):
        if mode not in (EXACT, TOLERANT):
            raise ValueError("unknown coefficient mode %r" % (mode,))
        eps = DEFAULT_EPS_ZERO if eps_zero is None else float(eps_zero)
        if eps <= 0:
            raise ValueError("eps_zero must be positive")
        raw = [_coerce(c, mode) for c in coeffs]
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "eps_zero", eps)
        object.__setattr__(self, "coeffs", self._trim(raw, mode, eps))

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @staticmethod
    def _trim(raw, mode, eps):
        # Strip leading (highest-power) coefficients that test as zero
        # against the polynomial's own magnitude.
        if mode == EXACT:
            while raw and raw[-1] == 0:
                raw.pop()
            return tuple(raw)
        scale = max((abs(c) for c in raw), default=0.0)
        if scale == 0.0:
            return ()
        tol = eps * scale
        while raw and abs(raw[-1]) <= tol:
            raw.pop()
        return tuple(raw)

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, mode=EXACT, eps_zero=None):
        return cls((), mode, eps_zero)

    @classmethod
    def constant(cls, value, mode=EXACT, eps_zero=None):
        return cls((value,), mode, eps_zero)

    @classmethod
    def one(cls, mode=EXACT, eps_zero=None):
        return cls((1,), mode, eps_zero)

    @classmethod
    def monomial(cls, power, coeff=1, mode=EXACT, eps_zero=None):
        """coeff * x**power"""
        if power < 0:
            raise ValueError("power must be nonnegative")
        return cls((0,) * power + (coeff,), mode, eps_zero)

    @classmethod
    def parse(cls, text, mode=EXACT, eps_zero=None):
        """Parse strings like ``-6x^2+7x-6`` or ``x^3-3/2x^2+3/2x-1/2``.

        Coefficients may be integers, ``p/q`` rationals, or decimal/
        scientific literals; whitespace is insignificant.
        """
        compact = re.sub(r"\s+", "", text)
        if not compact:
            raise ValueError("empty polynomial string")
        eps = DEFAULT_EPS_ZERO if eps_zero is None else float(eps_zero)
        terms = {}
        pos = 0
        while pos < len(compact):
            m = _TERM_RE.match(compact, pos)
            if m is None or m.end() == pos or (m.group("coeff") is None and m.group("var") is None):
                raise ValueError("cannot parse polynomial %r at offset %d" % (text, pos))
            if pos and m.group("sign") is None:
                raise ValueError(
                    "missing sign between terms in %r at offset %d" % (text, pos)
                )
            coeff_text = m.group("coeff")
            if coeff_text is None:
                value = Fraction(1)
            else:
                value = Fraction(coeff_text)
            if m.group("sign") == "-":
                value = -value
            if m.group("var") is None:
                power = 0
            elif m.group("exp") is None:
                power = 1
            else:
                power = int(m.group("exp"))
            terms[power] = terms.get(power, Fraction(0)) + value
            pos = m.end()
        top = max(terms)
        coeffs = [terms.get(k, 0) for k in range(top + 1)]
        return cls(coeffs, mode, eps)

    # -- structure ------------------------------------------------------

    @property
    def degree(self):
        """Degree as an int, or None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, power):
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return _coerce(0, self.mode)

    def inf_norm(self):
        return max((abs(c) for c in self.coeffs), default=_coerce(0, self.mode))

    def is_zero(self, scale=None):
        """Zero test; an explicit ``scale`` overrides the self-relative one.

        Entries of a matrix that cancel completely in float arithmetic
        leave noise at the scale of the surrounding computation, which a
        self-relative test can never recognize as zero.
        """
        if not self.coeffs:
            return True
        if self.mode == EXACT:
            return False
        if scale is None:
            return False  # trimmed representation keeps a genuine lead
        tol = self.eps_zero * float(scale)
        return all(abs(c) <= tol for c in self.coeffs)

    def is_constant(self, scale=None):
        return self.degree is None or self.degree == 0 or (
            self.mode == TOLERANT
            and scale is not None
            and self.chop(scale).degree in (None, 0)
        )

    def chop(self, scale):
        """Zero out coefficients below ``eps_zero * scale`` (tolerant only)."""
        if self.mode == EXACT or not self.coeffs:
            return self
        tol = self.eps_zero * float(scale)
        cleaned = [0.0 if abs(c) <= tol else c for c in self.coeffs]
        return Polynomial(cleaned, self.mode, self.eps_zero)

    # -- arithmetic -----------------------------------------------------

    def _wrap(self, coeffs, other=None):
        eps = self.eps_zero if other is None else max(self.eps_zero, other.eps_zero)
        return Polynomial(coeffs, self.mode, eps)

    def __add__(self, other):
        other = self._as_poly(other)
        _check_same_mode(self, other)
        n = max(len(self.coeffs), len(other.coeffs))
        return self._wrap(
            [self.coeff(k) + other.coeff(k) for k in range(n)], other
        )

    __radd__ = __add__

    def __neg__(self):
        return self._wrap([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._as_poly(other))

    def __rsub__(self, other):
        return self._as_poly(other) - self

    def __mul__(self, other):
        other = self._as_poly(other)
        _check_same_mode(self, other)
        if not self.coeffs or not other.coeffs:
            return self._wrap((), other)
        out = [_coerce(0, self.mode)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return self._wrap(out, other)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.one(self.mode, self.eps_zero)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scaled(self, factor):
        factor = _coerce(factor, self.mode)
        return self._wrap([c * factor for c in self.coeffs])

    def shifted(self, k):
        """Multiply by x**k."""
        if not self.coeffs:
            return self
        return self._wrap((0,) * k + self.coeffs)

    def __divmod__(self, other):
        other = self._as_poly(other)
        _check_same_mode(self, other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if self.degree is None or self.degree < other.degree:
            return self._wrap(()), self
        rem = list(self.coeffs)
        div = other.coeffs
        dd = len(div) - 1
        quot = [_coerce(0, self.mode)] * (len(rem) - dd)
        chop_scale = max(float(self.inf_norm()), float(other.inf_norm())) if self.mode == TOLERANT else None
        while len(rem) - 1 >= dd:
            q = rem[-1] / div[-1]
            k = len(rem) - 1 - dd
            quot[k] = q
            # Drop the top term outright; float cancellation is not exact.
            rem.pop()
            for i in range(dd):
                rem[k + i] -= q * div[i]
            if chop_scale is not None:
                chop_scale = max(chop_scale, abs(q) * float(other.inf_norm()))
                tol = max(self.eps_zero, other.eps_zero) * chop_scale
                while rem and abs(rem[-1]) <= tol:
                    rem.pop()
            else:
                while rem and rem[-1] == 0:
                    rem.pop()
        remainder = self._wrap(rem, other)
        if chop_scale is not None:
            remainder = remainder.chop(chop_scale)
        return self._wrap(quot, other), remainder

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        if not self.coeffs:
            return self
        return self.scaled(1 / self.lead)

    def __call__(self, point):
        """Evaluate by Horner's rule."""
        acc = _coerce(0, self.mode)
        for c in reversed(self.coeffs):
            acc = acc * point + c
        return acc

    def _as_poly(self, value):
        if isinstance(value, Polynomial):
            return value
        return Polynomial((value,), self.mode, self.eps_zero)

    # -- comparison and text --------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = self._as_poly(other)
        if self.mode != other.mode:
            return False
        if self.mode == EXACT:
            return self.coeffs == other.coeffs
        scale = max(float(self.inf_norm()), float(other.inf_norm()))
        if scale == 0.0:
            return True
        return (self - other).is_zero(scale)

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return "Polynomial(%r, mode=%r)" % (str(self), self.mode)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for power in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            negative = c < 0
            mag = -c if negative else c
            body = _format_coeff(mag, power)
            if not parts:
                parts.append("-" + body if negative else body)
            else:
                parts.append(("-" if negative else "+") + body)
        return "".join(parts)


def _format_coeff(mag, power):
    if power == 0:
        return _format_scalar(mag)
    var = "x" if power == 1 else "x^%d" % power
    if mag == 1:
        return var
    return _format_scalar(mag) + var


def _format_scalar(value):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return str(value.numerator)
        return "%d/%d" % (value.numerator, value.denominator)
    return repr(value)


def poly_ext_gcd(a, b):
    """Extended Euclidean algorithm: returns (g, p, q) with p*a + q*b = g.

    g is the monic GCD.  When a and b are coprime the pair (p, q) is
    reduced to the unique minimal-degree solution, deg p < deg b and
    deg q < deg a.

    Raises DegenerateInput when both arguments are zero.
    """
    _check_same_mode(a, b)
    if a.is_zero() and b.is_zero():
        raise DegenerateInput("gcd of two zero polynomials is undefined")
    mode, eps = a.mode, max(a.eps_zero, b.eps_zero)
    one = Polynomial.one(mode, eps)
    zero = Polynomial.zero(mode, eps)
    r0, r1 = a, b
    s0, s1 = one, zero
    t0, t1 = zero, one
    ref_scale = max(float(a.inf_norm() or 0), float(b.inf_norm() or 0), 1.0)
    while not r1.is_zero(scale=ref_scale if mode == TOLERANT else None):
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    g, p, q = r0, s0, t0
    lead = g.lead
    g, p, q = g.monic(), p.scaled(1 / lead), q.scaled(1 / lead)
    # Reduce to the minimal-degree pair.  With g == 1 this is the unique
    # solution with deg p < deg b; q is then recovered by exact division.
    if not b.is_zero() and not a.is_zero():
        b_red = (b // g) if g.degree else b.scaled(1 / g.coeff(0))
        if b_red.degree and p.degree is not None and p.degree >= b_red.degree:
            p = p % b_red
            q = (g - p * a) // b
    if mode == TOLERANT:
        scale = max(float(p.inf_norm() or 0), float(q.inf_norm() or 0), 1.0)
        p, q = p.chop(scale), q.chop(scale)
    return g, p, q


def poly_gcd(a, b):
    """Monic GCD without the Bezout pair."""
    return poly_ext_gcd(a, b)[0]
