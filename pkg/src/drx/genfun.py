"""Engine A: closed generating functions for DR-cycle psi-integrals.

Three closed forms are implemented.

* Single psi-power:   psi_s^(2g-3+n) . DR_g(a) = [z^2g] prod_{i!=s} S(a_i z) / S(z),
  valid both for a_s = 0 and a_s != 0, with the forgotten-point variant
  replacing S(b z) by S(b z) - 1.

* General monomial:   the coefficient of z_1^{d_1}...z_n^{d_n} in a sum over
  permutations fixing the first point of products of zeta factors of the
  determinant forms D_k = (a'_1+...+a'_k) z'_{k+1} - a'_{k+1} (z'_1+...+z'_k),
  divided by the consecutive forms a'_k z'_{k+1} - a'_{k+1} z'_k.  Each
  summand has genuine poles; only the sum is regular.  We therefore clear
  everything to the common denominator prod_{2<=i<j<=n} (a_i z_j - a_j z_i)
  and make the cancellation an assertable exact division (NonDivisible
  here means the input or the implementation is wrong).

* Completed-cycle constant:   m! (prod k_i / K!) [z^2g] S(z)^(K-1) prod S(k_i z).

Inputs with three or more zero labels make the common denominator collapse;
they are evaluated by perturbing the labels along the sum-zero hyperplane
with a formal parameter (see dr_psi_monomial_eps) and extracting the
regular part, asserting that no pole in the parameter survives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from .epsilon import EpsPoly
from .errors import (DegenerateLabels, DimensionError, DrxError, NonDivisible,
                     ResidualPole, SingularSystem)
from .linalg import solve_exact
from .partitions import compositions
from .series import (LinearForm, TruncSeries, inv_s_coefficients,
                     invert_univariate, s_coefficients, series_S, series_zeta)


class PolynomialityFailure(DrxError, ArithmeticError):
    """A fitted interpolation polynomial exceeded the expected degree 2g."""


@dataclass(frozen=True)
class DrProblem:
    """A zero-dimensional DR intersection query: genus, labels, psi-degrees."""

    g: int
    a: Tuple[int, ...]
    d: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "d", tuple(self.d))
        if self.g < 0:
            raise ValueError("genus must be non-negative")
        if sum(self.a) != 0:
            raise ValueError(f"ramification labels must sum to zero, got {self.a}")
        if len(self.a) != len(self.d):
            raise ValueError("label and degree lists have different lengths")
        if any(x < 0 for x in self.d):
            raise ValueError("psi-degrees must be non-negative")

    @property
    def n(self) -> int:
        return len(self.a)

    def dimension(self) -> int:
        return 2 * self.g - 3 + self.n

    def is_well_posed(self) -> bool:
        return self.n >= 1 and sum(self.d) == self.dimension() >= 0

    def require_well_posed(self):
        if not self.is_well_posed():
            raise DimensionError(
                f"sum(d)={sum(self.d)} does not match 2g-3+n={self.dimension()}")


@dataclass(frozen=True)
class ForgottenProblem:
    """Single-psi query on a DR-cycle with forgotten points b_1..b_p."""

    g: int
    a: Tuple[int, ...]
    b: Tuple[int, ...]
    s: int

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))
        if sum(self.a) + sum(self.b) != 0:
            raise ValueError("labels (surviving and forgotten) must sum to zero")
        if not 0 <= self.s < len(self.a):
            raise ValueError("marked index out of range")


# -- univariate helpers --------------------------------------------------


def _ulist_mul(f: List[Fraction], g: List[Fraction], bound: int) -> List[Fraction]:
    out = [Fraction(0)] * (bound + 1)
    for i, fi in enumerate(f):
        if fi == 0 or i > bound:
            continue
        for j, gj in enumerate(g):
            if gj == 0:
                continue
            if i + j > bound:
                break
            out[i + j] += fi * gj
    return out


def _s_list(c: int, bound: int) -> List[Fraction]:
    """Coefficients of S(c z) up to degree bound."""
    base = s_coefficients(bound)
    return [base[m] * Fraction(c) ** m for m in range(bound + 1)]


def _s_ratio_coefficient(g: int, scalers: Sequence[int], minus_one: Sequence[int] = ()) -> Fraction:
    """[z^2g] of prod S(c z) * prod (S(b z) - 1) / S(z)."""
    bound = 2 * g
    acc = inv_s_coefficients(bound)
    for c in scalers:
        acc = _ulist_mul(acc, _s_list(c, bound), bound)
    for b in minus_one:
        lst = _s_list(b, bound)
        lst[0] -= 1
        acc = _ulist_mul(acc, lst, bound)
    return acc[bound]


# -- single psi-power ----------------------------------------------------


def dr_psi_power(g: int, a: Sequence[int], s: int) -> Fraction:
    """psi_s^(2g-3+n) integrated against DR_g(a_1..a_n); s is 0-based."""
    a = tuple(a)
    n = len(a)
    if sum(a) != 0:
        raise ValueError("labels must sum to zero")
    if not 0 <= s < n:
        raise ValueError("marked index out of range")
    if 2 * g - 3 + n < 0:
        raise DimensionError(f"2g-3+n = {2*g-3+n} < 0")
    return _s_ratio_coefficient(g, [a[i] for i in range(n) if i != s])


def dr_psi_power_forgotten(g: int, a: Sequence[int], b: Sequence[int], s: int) -> Fraction:
    """psi_s^(2g-3+n+p) against DR_g(a; b~) with the b-points forgotten."""
    a, b = tuple(a), tuple(b)
    if sum(a) + sum(b) != 0:
        raise ValueError("labels must sum to zero")
    if not 0 <= s < len(a):
        raise ValueError("marked index out of range")
    if 2 * g - 3 + len(a) + len(b) < 0:
        raise DimensionError("negative psi-power")
    return _s_ratio_coefficient(g, [a[i] for i in range(len(a)) if i != s], b)


def completed_cycle_number(g: int, k: Sequence[int]) -> Fraction:
    """m! (prod k_i / K!) [z^2g] S(z)^(K-1) prod S(k_i z), with m = K+n+2g-2."""
    k = tuple(k)
    if not k or any(x < 1 for x in k):
        raise ValueError("profile entries must be positive")
    K = sum(k)
    n = len(k)
    m = K + n + 2 * g - 2
    bound = 2 * g
    acc = [Fraction(0)] * (bound + 1)
    acc[0] = Fraction(1)
    sz = _s_list(1, bound)
    for _ in range(K - 1):
        acc = _ulist_mul(acc, sz, bound)
    if K == 0:
        pass
    for ki in k:
        acc = _ulist_mul(acc, _s_list(ki, bound), bound)
    if K - 1 < 0:
        acc = _ulist_mul(acc, invert_univariate(sz, bound), bound)
    prod_k = 1
    for ki in k:
        prod_k *= ki
    return Fraction(factorial(m) * prod_k, factorial(K)) * acc[bound]


# -- the permutation-sum pipeline ---------------------------------------


def _zvars(n: int) -> Tuple[str, ...]:
    return tuple(f"z{i+1}" for i in range(n))


def _relabel_zero_first(a: Tuple, d: Tuple) -> Tuple[Tuple, Tuple]:
    """Swap the first zero label (if any) into position 0; value is symmetric."""
    if 0 in a and a[0] != 0:
        z0 = a.index(0)
        perm = list(range(len(a)))
        perm[0], perm[z0] = perm[z0], perm[0]
        return tuple(a[i] for i in perm), tuple(d[i] for i in perm)
    return a, d


def _pair_form(avals, vars, i: int, j: int) -> LinearForm:
    """Determinant form a_i z_j - a_j z_i."""
    return LinearForm({vars[j]: avals[i], vars[i]: -avals[j]})


def _summand_terms(avals, vars, bound: int, honest_tail: bool):
    """Yield (numerator series, residual pair set) per permutation fixing point 0.

    With honest_tail=False the last zeta factor and the 1/zeta(u) prefactor
    are pre-cancelled into (-a'_n) S(a'_n u) / S(u) (the S(u) division is
    left to the caller); with honest_tail=True the numerator keeps
    zeta(D_{n-1}) and the caller must also divide by u.
    """
    n = len(avals)
    u = LinearForm({v: 1 for v in vars})
    svals = s_coefficients(bound)
    zeta_coeffs = [Fraction(0)] + svals[:-1] if bound >= 1 else [Fraction(0)]
    for sigma in itertools.permutations(range(1, n)):
        order = (0,) + sigma
        # mid-variable prefactor z'_2 ... z'_{n-1}
        exps = [0] * n
        for pos in range(1, n - 1):
            exps[order[pos]] += 1
        prefix_a = avals[0]
        prefix_z = LinearForm({vars[0]: 1})
        acc = TruncSeries.monomial(vars, bound, tuple(exps), 1)
        residual = []
        sign = 1
        skip = False
        for k in range(1, n - 1):
            ak = avals[order[k]]
            dk = LinearForm({vars[order[k]]: prefix_a}) - prefix_z.scale(ak)
            if k == 1:
                acc = acc.mul_series_of_form(svals, dk)  # S(D_1): delta_1 cancelled
            else:
                if dk.is_zero():
                    skip = True
                    break
                acc = acc.mul_series_of_form(zeta_coeffs, dk)
            if k >= 2:
                i, j = order[k - 1], order[k]
                if i > j:
                    i, j = j, i
                    sign = -sign
                residual.append((i, j))
            prefix_a = prefix_a + ak
            prefix_z = prefix_z + LinearForm({vars[order[k]]: 1})
        if skip:
            continue
        a_last = avals[order[n - 1]]
        i, j = order[n - 2], order[n - 1]
        if i > j:
            i, j = j, i
            sign = -sign
        residual.append((i, j))
        if honest_tail:
            dk = LinearForm({vars[order[n - 1]]: prefix_a}) - prefix_z.scale(a_last)
            if dk.is_zero():
                continue
            acc = acc.mul_series_of_form(zeta_coeffs, dk)
        else:
            if a_last == 0:
                continue
            acc = acc.mul_series_of_form(svals, u.scale(a_last)).scale(-a_last)
        if sign < 0:
            acc = acc.scale(-1)
        yield acc, frozenset(residual)


def _clear_divide(avals, vars, bound: int, summands, honest_tail: bool,
                  eps_mode: bool = False) -> Tuple[TruncSeries, int]:
    """Clear all summands over the common pair denominator, sum, divide back.

    Returns the fully divided series and the number of formal-parameter
    shifts performed for degenerate pairs (eps_mode only).
    """
    n = len(avals)
    pairs = [(i, j) for i in range(1, n) for j in range(i + 1, n)]
    forms = {p: _pair_form(avals, vars, *p) for p in pairs}
    total = TruncSeries.zero(vars, bound)
    for num, residual in summands:
        for p in pairs:
            if p not in residual:
                num = num.mul_form(forms[p])
        total = total + num

    shifts = 0
    for p in pairs:
        i, j = p
        if eps_mode and _const_part(avals[i]) == 0 and _const_part(avals[j]) == 0:
            # degenerate pair: the form is eps * (c_i z_j - c_j z_i); divide by
            # the integer part now, account the eps power at the end
            lform = LinearForm({vars[j]: _slope_part(avals[i]),
                                vars[i]: -_slope_part(avals[j])})
            total = total.divide_form(lform)
            shifts += 1
        else:
            total = total.divide_form(forms[p])
    u = LinearForm({v: 1 for v in vars})
    if honest_tail:
        total = total.divide_form(u)
    total = total.mul_series_of_form(inv_s_coefficients(total.bound), u)
    return total, shifts


def _const_part(c):
    if isinstance(c, EpsPoly):
        return c.coefficient(0)
    return c


def _slope_part(c):
    if isinstance(c, EpsPoly):
        return c.coefficient(1)
    return Fraction(0)


@lru_cache(maxsize=4096)
def _divided_series(g: int, a_rel: Tuple[int, ...], honest_tail: bool) -> TruncSeries:
    """The cleared and fully divided generating series for one (g, labels)."""
    n = len(a_rel)
    sum_d = 2 * g - 3 + n
    vars = _zvars(n)
    npairs = (n - 1) * (n - 2) // 2
    bound = sum_d + npairs + 2 + (1 if honest_tail else 0)
    avals = [Fraction(x) for x in a_rel]
    summands = _summand_terms(avals, vars, bound, honest_tail)
    series, _ = _clear_divide(avals, vars, bound, summands, honest_tail)
    return series


def _two_point_value(g: int, a1: int, d: Tuple[int, int]) -> Fraction:
    # S(a u)/(u S(u)): drop the 1/u singular term, then the coefficient of
    # z1^d1 z2^d2 in u^(2g-1) G_{2g} is binom(2g-1, d1) [u^2g] S(a u)/S(u)
    return comb(2 * g - 1, d[0]) * _s_ratio_coefficient(g, [a1])


def dr_psi_monomial(g: int, a: Sequence[int], d: Sequence[int]) -> Fraction:
    """Coefficient extraction from the permutation-sum generating function.

    Requires at most two zero labels; degenerate inputs must go through
    dr_psi_monomial_eps or the splitting engine.
    """
    prob = DrProblem(g, tuple(a), tuple(d))
    prob.require_well_posed()
    n = prob.n
    if n == 1:
        return dr_psi_power(g, prob.a, 0)
    if n == 2:
        return _two_point_value(g, prob.a[0], prob.d)
    zeros = sum(1 for x in prob.a if x == 0)
    if zeros > 2:
        raise DegenerateLabels(
            f"{zeros} zero labels: use dr_psi_monomial_eps or the splitting engine")
    a_rel, d_rel = _relabel_zero_first(prob.a, prob.d)
    series = _divided_series(g, a_rel, False)
    return series.coefficient(d_rel)


# -- perturbed evaluation for degenerate label sets -----------------------


def _slopes_spec(a_rel: Tuple[int, ...]) -> List[int]:
    """Slope i+1 at position i: a_i -> a_i + (i+1) eps."""
    return [i + 1 for i in range(len(a_rel))]


def _slopes_zero_sum(a_rel: Tuple[int, ...]) -> List[int]:
    """Nonzero slopes on the zero labels only, summing to zero.

    Keeps the perturbed labels on the sum-zero hyperplane, where the
    generating function is the honest DR value for every parameter value.
    """
    zero_pos = [i for i, x in enumerate(a_rel) if x == 0]
    m = len(zero_pos)
    slopes = [0] * len(a_rel)
    for idx, pos in enumerate(zero_pos[:-1]):
        slopes[pos] = idx + 1
    slopes[zero_pos[-1]] = -m * (m - 1) // 2
    return slopes


def dr_psi_monomial_eps(g: int, a: Sequence[int], d: Sequence[int],
                        slopes: Sequence[int] | None = None) -> Fraction:
    """Monomial evaluation with labels perturbed off the degenerate locus.

    Labels a_i become a_i + c_i * eps; the pipeline runs over truncated
    polynomials in eps, each degenerate pair denominator contributes one
    global eps shift, and the answer is the regular part.  A surviving
    negative eps-power raises ResidualPole.
    """
    prob = DrProblem(g, tuple(a), tuple(d))
    prob.require_well_posed()
    n = prob.n
    if n < 3:
        return dr_psi_monomial(g, prob.a, prob.d)
    a_rel, d_rel = _relabel_zero_first(prob.a, prob.d)
    if slopes is None:
        slopes = _slopes_spec(a_rel)
    elif len(slopes) != n:
        raise ValueError("need one slope per label")
    B = sum(1 for i in range(1, n) for j in range(i + 1, n)
            if a_rel[i] == 0 and a_rel[j] == 0)
    if B == 0:
        return dr_psi_monomial(g, prob.a, prob.d)
    for i in range(n):
        if a_rel[i] == 0 and slopes[i] == 0:
            raise ValueError("zero labels need a nonzero perturbation slope")
    sum_d = prob.dimension()
    vars = _zvars(n)
    npairs = (n - 1) * (n - 2) // 2
    bound = sum_d + npairs + 2
    avals = [EpsPoly.linear(a_rel[i], slopes[i], B) for i in range(n)]
    summands = _summand_terms(avals, vars, bound, honest_tail=False)
    series, shifts = _clear_divide(avals, vars, bound, summands,
                                   honest_tail=False, eps_mode=True)
    if shifts != B:
        raise ResidualPole(f"expected {B} degenerate shifts, performed {shifts}")
    val = series.coefficient(d_rel)
    if not isinstance(val, EpsPoly):
        val = EpsPoly.const(val, B)
    for m in range(B):
        if val.coefficient(m) != 0:
            raise ResidualPole(
                f"eps^{m - B} coefficient {val.coefficient(m)} survived the limit")
    return val.coefficient(B)


def evaluate(g: int, a: Sequence[int], d: Sequence[int]) -> Fraction:
    """Engine-A entry point: routes degenerate label sets through the
    perturbed path and everything else through the closed formulas."""
    a, d = tuple(a), tuple(d)
    if len(a) >= 3 and sum(1 for x in a if x == 0) > 2:
        return dr_psi_monomial_eps(g, a, d)
    return dr_psi_monomial(g, a, d)


# -- polynomial interpolation in the labels ------------------------------


def _monomials_upto(nvars: int, cap: int) -> List[Tuple[int, ...]]:
    out = []
    for total in range(cap + 1):
        out.extend(compositions(total, nvars))
    return out


def interpolate_polynomial(g: int, n: int, d: Sequence[int],
                           grid: Sequence[Sequence[int]],
                           degree_cap: int | None = None) -> Dict[Tuple[int, ...], Fraction]:
    """Fit the DR value as a polynomial in a_1..a_{n-1} (a_n eliminated).

    The fit runs at cap 2g+2 and the coefficients above total degree 2g
    must vanish exactly; the returned table only contains degrees <= 2g.
    """
    d = tuple(d)
    if len(d) != n:
        raise ValueError("degree list must have length n")
    cap = 2 * g + 2 if degree_cap is None else degree_cap
    monos = _monomials_upto(n - 1, cap)
    rows, rhs, seen = [], [], set()
    for avec in grid:
        avec = tuple(avec)
        if len(avec) == n:
            if sum(avec) != 0:
                raise ValueError(f"grid point {avec} does not sum to zero")
            free = avec[:-1]
        elif len(avec) == n - 1:
            free = avec
            avec = avec + (-sum(avec),)
        else:
            raise ValueError("grid points must have n or n-1 entries")
        if free in seen:
            continue
        seen.add(free)
        rows.append([_eval_mono(free, m) for m in monos])
        rhs.append(evaluate(g, avec, d))
    if len(rows) < len(monos):
        raise SingularSystem(
            f"{len(rows)} grid points cannot determine {len(monos)} coefficients")
    sol = solve_exact(rows, rhs)
    out: Dict[Tuple[int, ...], Fraction] = {}
    for mono, c in zip(monos, sol):
        if c == 0:
            continue
        if sum(mono) > 2 * g:
            raise PolynomialityFailure(
                f"coefficient {c} at degree {sum(mono)} exceeds 2g = {2*g}")
        out[mono] = c
    return out


def _eval_mono(point: Tuple[int, ...], mono: Tuple[int, ...]) -> Fraction:
    v = Fraction(1)
    for x, e in zip(point, mono):
        v *= Fraction(x) ** e
    return v


def evaluate_polynomial(coeffs: Dict[Tuple[int, ...], Fraction],
                        point: Sequence[int]) -> Fraction:
    return sum((c * _eval_mono(tuple(point), m) for m, c in coeffs.items()),
               Fraction(0))


def default_grid(g: int, n: int, extra: int = 6) -> List[Tuple[int, ...]]:
    """Integer label vectors on the sum-zero hyperplane, enough for a 2g+2 fit."""
    need = len(_monomials_upto(n - 1, 2 * g + 2)) + extra
    out = []
    radius = 1
    while len(out) < need:
        out = []
        rng = range(-radius, radius + 1)
        for free in itertools.product(rng, repeat=n - 1):
            out.append(tuple(free) + (-sum(free),))
        radius += 1
    return out
