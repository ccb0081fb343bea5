"""Truncated polynomials in a formal perturbation parameter.

EpsPoly represents an element of Q[eps] / (eps^(cap+1)).  It is used as a
drop-in coefficient type for TruncSeries when ramification labels are
perturbed off a degenerate locus: arithmetic mixes freely with Fraction
and int, and every operation truncates degrees above the cap.

Division is only defined when the divisor is a unit (nonzero constant
term); the degenerate denominators that would force a genuine 1/eps are
factored out explicitly by the caller, so all arithmetic here stays
polynomial and exact modulo eps^(cap+1).
"""

from __future__ import annotations

from fractions import Fraction


class EpsPoly:
    __slots__ = ("cap", "c")

    def __init__(self, coeffs, cap: int):
        self.cap = cap
        c = {}
        for k, v in coeffs.items():
            if k < 0:
                raise ValueError("negative eps-degree is not representable")
            if k <= cap and v != 0:
                c[k] = v if isinstance(v, Fraction) else Fraction(v)
        self.c = c

    @classmethod
    def const(cls, value, cap: int) -> "EpsPoly":
        return cls({0: Fraction(value)}, cap)

    @classmethod
    def linear(cls, const, slope, cap: int) -> "EpsPoly":
        return cls({0: Fraction(const), 1: Fraction(slope)}, cap)

    def _coerce(self, other):
        if isinstance(other, EpsPoly):
            if other.cap != self.cap:
                raise ValueError("eps-degree caps differ")
            return other
        if isinstance(other, (int, Fraction)):
            return EpsPoly({0: Fraction(other)}, self.cap)
        return None

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.c == o.c

    __hash__ = None

    def __neg__(self):
        return EpsPoly({k: -v for k, v in self.c.items()}, self.cap)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.c)
        for k, v in o.c.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return EpsPoly(out, self.cap)

    __radd__ = __add__

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
        out = {}
        cap = self.cap
        for k1, v1 in self.c.items():
            for k2, v2 in o.c.items():
                k = k1 + k2
                if k > cap:
                    continue
                s = out.get(k, 0) + v1 * v2
                if s:
                    out[k] = s
                else:
                    out.pop(k, None)
        return EpsPoly(out, cap)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            inv = Fraction(1, 1) / Fraction(other)
            return EpsPoly({k: v * inv for k, v in self.c.items()}, self.cap)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.unit_inverse()

    def unit_inverse(self) -> "EpsPoly":
        """Inverse modulo eps^(cap+1); requires a nonzero constant term."""
        c0 = self.c.get(0, Fraction(0))
        if c0 == 0:
            raise ZeroDivisionError("eps-polynomial is not a unit")
        inv = {0: Fraction(1) / c0}
        for k in range(1, self.cap + 1):
            s = Fraction(0)
            for j, v in self.c.items():
                if 0 < j <= k and (k - j) in inv:
                    s += v * inv[k - j]
            if s:
                inv[k] = -s / c0
        return EpsPoly(inv, self.cap)

    def valuation(self) -> int:
        """Smallest eps-degree with nonzero coefficient (cap+1 for zero)."""
        return min(self.c) if self.c else self.cap + 1

    def leading(self) -> Fraction:
        return self.c[min(self.c)] if self.c else Fraction(0)

    def coefficient(self, k: int) -> Fraction:
        return self.c.get(k, Fraction(0))

    def __repr__(self):
        if not self.c:
            return "EpsPoly(0)"
        parts = [f"{v}*e^{k}" for k, v in sorted(self.c.items())]
        return "EpsPoly(" + " + ".join(parts) + ")"
