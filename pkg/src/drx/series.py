"""Exact multivariate power series truncated at a total degree.

A TruncSeries is a sparse map from exponent tuples to coefficients; every
monomial whose total degree exceeds the bound T is forgotten.  Coefficients
are fractions.Fraction by default, but any exact ring element with
compatible +,-,*,/ works (drx.epsilon.EpsPoly is used for perturbed
computations), so all results are bit-reproducible.

The building blocks of every generating function in this package are the
even/odd pair

    S(x)    = sinh(x/2) / (x/2) = 1 + x^2/24 + x^4/1920 + x^6/322560 + ...
    zeta(x) = e^{x/2} - e^{-x/2} = x * S(x)

applied to linear forms of the variables, combined with truncated
products, unit-series inverses, and exact division by linear forms.  The
exact divisions are load-bearing: a nonzero remainder (NonDivisible)
signals a pole that should have cancelled.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .errors import NonDivisible, ZeroConstantTerm

Exponent = Tuple[int, ...]

_ZERO = Fraction(0)


def _as_coeff(v):
    return v if isinstance(v, Fraction) else (Fraction(v) if isinstance(v, int) else v)


class LinearForm:
    """Exact linear combination of named formal variables (no constant term)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[str, object] | Iterable = ()):
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        c = {}
        for var, v in items:
            v = _as_coeff(v)
            if v == 0:
                continue
            c[var] = c[var] + v if var in c else v
            if c[var] == 0:
                del c[var]
        self.coeffs = c

    @classmethod
    def var(cls, name: str, scale=1) -> "LinearForm":
        return cls({name: scale})

    @classmethod
    def combo(cls, names: Sequence[str], scales: Sequence) -> "LinearForm":
        return cls(zip(names, scales))

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self):
        return self.coeffs.items()

    def __add__(self, other: "LinearForm") -> "LinearForm":
        out = dict(self.coeffs)
        for var, v in other.coeffs.items():
            s = out.get(var, 0) + v
            if s == 0:
                out.pop(var, None)
            else:
                out[var] = s
        lf = LinearForm.__new__(LinearForm)
        lf.coeffs = out
        return lf

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + other.scale(-1)

    def __neg__(self) -> "LinearForm":
        return self.scale(-1)

    def scale(self, c) -> "LinearForm":
        c = _as_coeff(c)
        if c == 0:
            return LinearForm()
        lf = LinearForm.__new__(LinearForm)
        lf.coeffs = {var: v * c for var, v in self.coeffs.items()}
        return lf

    def __eq__(self, other):
        return isinstance(other, LinearForm) and self.coeffs == other.coeffs

    __hash__ = None

    def key(self) -> tuple:
        """Canonical hashable snapshot (requires Fraction coefficients)."""
        return tuple(sorted(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "LinearForm(0)"
        return "LinearForm(" + " + ".join(f"{v}*{k}" for k, v in sorted(self.coeffs.items())) + ")"


def _pivot_rank(c):
    """Order key for pivot choice: prefer unit-valuation, then large magnitude."""
    if isinstance(c, Fraction):
        return (0, abs(c))
    return (c.valuation(), abs(c.leading()))


class TruncSeries:
    """Sparse polynomial over an ordered variable tuple, truncated at total degree."""

    __slots__ = ("vars", "bound", "terms")

    def __init__(self, vars: Tuple[str, ...], bound: int, terms: Dict[Exponent, object] | None = None):
        self.vars = vars
        self.bound = bound
        self.terms = terms if terms is not None else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, vars: Tuple[str, ...], bound: int) -> "TruncSeries":
        return cls(vars, bound, {})

    @classmethod
    def const(cls, vars: Tuple[str, ...], bound: int, value) -> "TruncSeries":
        value = _as_coeff(value)
        if value == 0:
            return cls(vars, bound, {})
        return cls(vars, bound, {(0,) * len(vars): value})

    @classmethod
    def monomial(cls, vars: Tuple[str, ...], bound: int, exps: Exponent, value=1) -> "TruncSeries":
        value = _as_coeff(value)
        if value == 0 or sum(exps) > bound:
            return cls(vars, bound, {})
        return cls(vars, bound, {tuple(exps): value})

    @classmethod
    def from_linear_form(cls, form: LinearForm, vars: Tuple[str, ...], bound: int) -> "TruncSeries":
        if bound < 1:
            return cls(vars, bound, {})
        idx = {v: i for i, v in enumerate(vars)}
        n = len(vars)
        terms = {}
        for var, c in form.items():
            e = [0] * n
            e[idx[var]] = 1
            terms[tuple(e)] = c
        return cls(vars, bound, terms)

    # -- basic structure ----------------------------------------------

    def _check_compatible(self, other: "TruncSeries"):
        if self.vars != other.vars or self.bound != other.bound:
            raise ValueError("series have mismatched variables or bounds")

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), _ZERO)

    def coefficient(self, exps: Sequence[int]):
        exps = tuple(exps)
        if sum(exps) > self.bound:
            raise ValueError(f"exponent {exps} exceeds truncation bound {self.bound}")
        return self.terms.get(exps, _ZERO)

    def truncate(self, new_bound: int) -> "TruncSeries":
        if new_bound >= self.bound:
            return TruncSeries(self.vars, new_bound, dict(self.terms))
        return TruncSeries(
            self.vars, new_bound,
            {e: c for e, c in self.terms.items() if sum(e) <= new_bound})

    def __eq__(self, other):
        return (isinstance(other, TruncSeries) and self.vars == other.vars
                and self.bound == other.bound and self.terms == other.terms)

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "TruncSeries(0)"
        bits = []
        for e, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])):
            mono = "*".join(f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            bits.append(f"{c}" + (f"*{mono}" if mono else ""))
        return "TruncSeries(" + " + ".join(bits) + f"; T={self.bound})"

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_compatible(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s == 0:
                out.pop(e, None)
            else:
                out[e] = s
        return TruncSeries(self.vars, self.bound, out)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + other.scale(-1)

    def __neg__(self) -> "TruncSeries":
        return self.scale(-1)

    def scale(self, c) -> "TruncSeries":
        c = _as_coeff(c)
        if c == 0:
            return TruncSeries(self.vars, self.bound, {})
        out = {}
        for e, v in self.terms.items():
            p = v * c
            if p != 0:
                out[e] = p
        return TruncSeries(self.vars, self.bound, out)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_compatible(other)
        bound = self.bound
        out = {}
        # iterate over the smaller factor outside
        a, b = (self.terms, other.terms) if len(self.terms) <= len(other.terms) else (other.terms, self.terms)
        for e1, c1 in a.items():
            d1 = sum(e1)
            for e2, c2 in b.items():
                if d1 + sum(e2) > bound:
                    continue
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s == 0:
                    out.pop(e, None)
                else:
                    out[e] = s
        return TruncSeries(self.vars, bound, out)

    def mul_form(self, form: LinearForm) -> "TruncSeries":
        """Multiply by a linear form (cost O(#terms * #form vars))."""
        idx = {v: i for i, v in enumerate(self.vars)}
        bound = self.bound
        out = {}
        cols = [(idx[var], c) for var, c in form.items()]
        for e, v in self.terms.items():
            if sum(e) >= bound:
                continue
            for i, c in cols:
                e2 = e[:i] + (e[i] + 1,) + e[i + 1:]
                s = out.get(e2, 0) + v * c
                if s == 0:
                    out.pop(e2, None)
                else:
                    out[e2] = s
        return TruncSeries(self.vars, bound, out)

    def mul_series_of_form(self, coeffs: Sequence, form: LinearForm) -> "TruncSeries":
        """Multiply by sum_m coeffs[m] * form^m without forming big products.

        Each step is a linear-form multiply of an accumulator, so the cost is
        O(len(coeffs) * #terms * #form vars) instead of a full series product.
        """
        acc = TruncSeries(self.vars, self.bound, {})
        pw = self
        for m, cm in enumerate(coeffs):
            if m > self.bound:
                break
            if m > 0:
                pw = pw.mul_form(form)
                if pw.is_zero():
                    break
            cm = _as_coeff(cm)
            if cm != 0:
                acc = acc + pw.scale(cm)
        return acc

    # -- inverses and exact division ----------------------------------

    def invert_unit(self) -> "TruncSeries":
        """Multiplicative inverse of a series with nonzero constant term."""
        c0 = self.constant_term()
        if c0 == 0:
            raise ZeroConstantTerm("cannot invert a series with zero constant term")
        nvars = len(self.vars)
        zero_exp = (0,) * nvars
        # bucket the strictly positive-degree part of self by total degree
        fpos = {}
        for e, c in self.terms.items():
            d = sum(e)
            if d > 0:
                fpos.setdefault(d, []).append((e, c))
        one = Fraction(1)
        g = {zero_exp: one / c0 if isinstance(c0, Fraction) else one / c0}
        by_deg = {0: [zero_exp]}
        for deg in range(1, self.bound + 1):
            contrib = {}
            for fd, fl in fpos.items():
                gd = deg - fd
                if gd < 0 or gd not in by_deg:
                    continue
                for ge in by_deg[gd]:
                    gc = g[ge]
                    for fe, fc in fl:
                        e = tuple(x + y for x, y in zip(fe, ge))
                        s = contrib.get(e, 0) + fc * gc
                        if s == 0:
                            contrib.pop(e, None)
                        else:
                            contrib[e] = s
            if contrib:
                lvl = []
                for e, s in contrib.items():
                    val = -s / c0
                    if val != 0:
                        g[e] = val
                        lvl.append(e)
                if lvl:
                    by_deg[deg] = lvl
        return TruncSeries(self.vars, self.bound, g)

    def divide_form(self, form: LinearForm) -> "TruncSeries":
        """Exact division by a nonzero linear form; the bound drops by one.

        Raises NonDivisible when a remainder survives, which in this package
        always indicates a pole that failed to cancel.
        """
        if form.is_zero():
            raise ZeroDivisionError("division by the zero form")
        idx = {v: i for i, v in enumerate(self.vars)}
        # pivot: smallest valuation, then largest |coefficient|, then first variable
        entries = sorted(form.items(), key=lambda kv: idx[kv[0]])
        best = None
        for var, c in entries:
            r = _pivot_rank(c)
            if best is None or (r[0], ) < (best[1][0], ) or (r[0] == best[1][0] and r[1] > best[1][1]):
                best = (var, r, c)
        pvar, _, pc = best
        p = idx[pvar]
        rest = [(idx[var], c) for var, c in form.items() if var != pvar]

        # Solve f = q*form level by level in the pivot exponent, descending:
        #   q[F] = (f[F+e_p] - sum_v rest_v * q[F+e_p-e_v]) / pc
        # then check the pivot-free equations f[G] = sum_v rest_v * q[G-e_v].
        max_lvl = 0
        f_by_lvl = {}
        for e, c in self.terms.items():
            f_by_lvl.setdefault(e[p], {})[e] = c
            if e[p] > max_lvl:
                max_lvl = e[p]
        def bump(e: Exponent, i: int, by: int) -> Exponent:
            return e[:i] + (e[i] + by,) + e[i + 1:]

        q: Dict[Exponent, object] = {}
        q_by_lvl: Dict[int, list] = {}
        for lvl in range(max_lvl - 1, -1, -1):
            cand = set()
            for e in f_by_lvl.get(lvl + 1, ()):  # equation sourced at f[F + e_p]
                cand.add(bump(e, p, -1))
            for e in q_by_lvl.get(lvl + 1, ()):  # q[F] reads q[F + e_p - e_v]
                for v, _ in rest:
                    cand.add(bump(bump(e, p, -1), v, +1))
            lvl_entries = []
            fl = f_by_lvl.get(lvl + 1, {})
            for F in cand:
                if sum(F) > self.bound - 1:
                    continue
                up = bump(F, p, +1)
                s = fl.get(up, 0)
                for v, c in rest:
                    if up[v] == 0:
                        continue
                    qc = q.get(bump(up, v, -1))
                    if qc is not None:
                        s = s - c * qc
                if s != 0:
                    q[F] = s / pc
                    lvl_entries.append(F)
            if lvl_entries:
                q_by_lvl[lvl] = lvl_entries
        # pivot-free equations f[G] = sum_v rest_v * q[G - e_v] are pure checks
        check = set(f_by_lvl.get(0, {}))
        for e in q_by_lvl.get(0, ()):
            for v, _ in rest:
                check.add(bump(e, v, +1))
        fl0 = f_by_lvl.get(0, {})
        for G in check:
            s = fl0.get(G, 0)
            for v, cv in rest:
                if G[v] == 0:
                    continue
                qc = q.get(bump(G, v, -1))
                if qc is not None:
                    s = s - cv * qc
            if s != 0:
                raise NonDivisible(f"remainder at {G} while dividing by {form!r}")
        return TruncSeries(self.vars, self.bound - 1, q)


# -- series builders ----------------------------------------------------


def s_coefficients(bound: int) -> list:
    """Univariate coefficients of S(x) = sinh(x/2)/(x/2) up to degree bound."""
    out = []
    for m in range(bound + 1):
        if m % 2 == 0:
            k = m // 2
            out.append(Fraction(1, 4 ** k * factorial(2 * k + 1)))
        else:
            out.append(Fraction(0))
    return out


def invert_univariate(coeffs: Sequence[Fraction], bound: int) -> list:
    """Inverse of a univariate unit series given as a dense coefficient list."""
    if not coeffs or coeffs[0] == 0:
        raise ZeroConstantTerm("univariate series is not a unit")
    inv = [Fraction(0)] * (bound + 1)
    inv[0] = Fraction(1) / coeffs[0]
    for m in range(1, bound + 1):
        s = Fraction(0)
        for j in range(1, min(m, len(coeffs) - 1) + 1):
            if coeffs[j]:
                s += coeffs[j] * inv[m - j]
        inv[m] = -s / coeffs[0]
    return inv


def inv_s_coefficients(bound: int) -> list:
    return invert_univariate(s_coefficients(bound), bound)


def series_S(arg: LinearForm, bound: int, vars: Tuple[str, ...]) -> TruncSeries:
    """S(arg) as a truncated series: sum_k arg^(2k) / (4^k (2k+1)!)."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    one = TruncSeries.const(vars, bound, 1)
    if arg.is_zero():
        return one
    return one.mul_series_of_form(s_coefficients(bound), arg)


def series_zeta(arg: LinearForm, bound: int, vars: Tuple[str, ...]) -> TruncSeries:
    """zeta(arg) = arg * S(arg); an odd series with zero constant term."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    if arg.is_zero():
        return TruncSeries.zero(vars, bound)
    base = TruncSeries.from_linear_form(arg, vars, bound)
    return base.mul_series_of_form(s_coefficients(bound), arg)


def series_exp(arg: LinearForm, bound: int, vars: Tuple[str, ...]) -> TruncSeries:
    """exp(arg) as a truncated series."""
    coeffs = [Fraction(1, factorial(m)) for m in range(bound + 1)]
    return TruncSeries.const(vars, bound, 1).mul_series_of_form(coeffs, arg)


# -- spec-named operation wrappers ---------------------------------------


def mul(f: TruncSeries, g: TruncSeries) -> TruncSeries:
    return f * g


def divide_exact_by_linear_form(f: TruncSeries, d: LinearForm) -> TruncSeries:
    return f.divide_form(d)


def invert_unit_series(f: TruncSeries) -> TruncSeries:
    return f.invert_unit()


def coefficient(f: TruncSeries, exps: Sequence[int]):
    return f.coefficient(exps)
