"""Engine C: semi-infinite wedge (fermionic Fock space) evaluation.

Basis vectors v_lambda are indexed by partitions through their occupied
fermion modes lambda_i - i + 1/2.  The operator E_n(z) acts by moving one
occupied mode down by n with weight e^{z(k - n/2)} and a fermionic sign
(-1)^(number of occupied modes strictly between source and target); E_0(z)
is diagonal with eigenvalue 1/zeta(z) + sum_i (e^{z(lambda_i-i+1/2)} -
e^{z(-i+1/2)}).  The singular 1/zeta part is never expanded inside states:
each E_0 splits the computation into a regular branch and a 1/zeta-tagged
identity branch, and the tags are cleared at the very end by exact
division (zeta(f) = f * S(f)), so a pole that fails to cancel is detected
rather than silently truncated.

Vacuum expectation values apply the operator list right to left to |0>;
connected values are obtained by Moebius inversion over set partitions of
the operator slots, blocks keeping their relative order, where only
blocks with zero total energy contribute.

The nested-commutator route to psi-monomials collapses an iterated
commutator of E-operators into a product of zeta factors of determinant
forms times E_0(z_1+...+z_n), attaches the consecutive-pair denominators,
and reuses the generating-function engine's common-denominator clearing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import (DegenerateLabels, DimensionError, EnergyBudgetExceeded,
                     NonDivisible, NonZeroTotalEnergy)
from .genfun import (_clear_divide, _relabel_zero_first, _summand_terms,
                     _two_point_value, _zvars, DrProblem, dr_psi_power)
from .partitions import Partition, cycle_type_order, partitions_upto
from .series import (LinearForm, TruncSeries, inv_s_coefficients,
                     s_coefficients, series_exp)

Amplitudes = Dict[Partition, TruncSeries]


@dataclass(frozen=True, eq=False)
class EOp:
    """E_n at a linear-form argument; a zero form means the operator at 0."""

    energy: int
    form: LinearForm

    @classmethod
    def at(cls, energy: int, var: str) -> "EOp":
        return cls(energy, LinearForm.var(var))

    @classmethod
    def alpha(cls, energy: int) -> "EOp":
        if energy == 0:
            raise ValueError("E_0 needs a formal variable")
        return cls(energy, LinearForm())

    def __repr__(self):
        return f"EOp({self.energy}, {self.form!r})"


class FockState:
    """Finite charge-zero state: partition -> truncated-series amplitude."""

    __slots__ = ("vars", "bound", "amps")

    def __init__(self, vars: Tuple[str, ...], bound: int, amps: Amplitudes | None = None):
        self.vars = vars
        self.bound = bound
        self.amps = amps if amps is not None else {}

    @classmethod
    def vacuum(cls, vars: Tuple[str, ...], bound: int) -> "FockState":
        return cls(vars, bound, {(): TruncSeries.const(vars, bound, 1)})

    def amplitude(self, lam: Partition) -> TruncSeries:
        return self.amps.get(tuple(lam), TruncSeries.zero(self.vars, self.bound))

    def is_zero(self) -> bool:
        return not self.amps


def _mode_moves(lam: Partition, n: int):
    """Moves k -> k-n of one occupied fermion mode, with fermionic sign.

    Yields (new_partition, sign, doubled_source_mode).  Modes are handled
    as doubled odd integers 2(lam_i - i) + 1 so everything stays integral.
    """
    window = sum(lam) + abs(n) + 2
    modes = [2 * ((lam[i] if i < len(lam) else 0) - i) - 1 for i in range(window)]
    occupied = set(modes)
    lowest = modes[-1]
    for k in modes:
        tgt = k - 2 * n
        if tgt in occupied or tgt < lowest:
            continue
        lo, hi = (tgt, k) if tgt < k else (k, tgt)
        sign = -1 if sum(1 for m in modes if lo < m < hi) % 2 else 1
        new_modes = sorted((m for m in modes if m != k), reverse=True)
        new_modes.append(tgt)
        new_modes.sort(reverse=True)
        parts = []
        for i, m in enumerate(new_modes):
            li = (m + 2 * i + 1) // 2
            if li > 0:
                parts.append(li)
        yield tuple(parts), sign, k
    # moves from below the window would land on occupied tail modes


def _diagonal_regular(lam: Partition, form: LinearForm, vars, bound) -> TruncSeries:
    """sum_i (e^{form (lam_i - i + 1/2)} - e^{form (-i + 1/2)}) on v_lambda."""
    out = TruncSeries.zero(vars, bound)
    for i, part in enumerate(lam):
        hi = Fraction(2 * (part - i) - 1, 2)
        lo = Fraction(-2 * i - 1, 2)
        out = out + series_exp(form.scale(hi), bound, vars) \
                  - series_exp(form.scale(lo), bound, vars)
    return out


def apply_E(op: EOp, state: FockState, max_size: int | None = None
            ) -> Tuple[FockState, Optional[FockState]]:
    """Apply one E-operator.

    Returns (regular_state, zeta_tagged_state); the second entry is the
    identity branch carrying the 1/zeta(form) prefactor and is None unless
    the operator has zero energy.
    """
    vars, bound = state.vars, state.bound
    n = op.energy
    if n == 0:
        if op.form.is_zero():
            raise ValueError("E_0 at argument 0 is not defined")
        reg: Amplitudes = {}
        for lam, amp in state.amps.items():
            v = amp * _diagonal_regular(lam, op.form, vars, bound)
            if not v.is_zero():
                reg[lam] = v
        return FockState(vars, bound, reg), FockState(vars, bound, dict(state.amps))
    out: Amplitudes = {}
    exp_cache: Dict[int, TruncSeries] = {}
    for lam, amp in state.amps.items():
        for new_lam, sign, kk in _mode_moves(lam, n):
            if max_size is not None and sum(new_lam) > max_size:
                raise EnergyBudgetExceeded(
                    f"partition of size {sum(new_lam)} exceeds the budget {max_size}")
            key = kk - n  # doubled exponent 2(k - n/2)
            w = exp_cache.get(key)
            if w is None:
                if op.form.is_zero():
                    w = TruncSeries.const(vars, bound, 1)
                else:
                    w = series_exp(op.form.scale(Fraction(key, 2)), bound, vars)
                exp_cache[key] = w
            v = amp * w
            if sign < 0:
                v = v.scale(-1)
            if new_lam in out:
                v = out[new_lam] + v
            if v.is_zero():
                out.pop(new_lam, None)
            else:
                out[new_lam] = v
    return FockState(vars, bound, out), None


# -- vacuum expectation values -------------------------------------------


@dataclass
class VevResult:
    """Numerator series plus any 1/form factors that did not clear."""

    numerator: TruncSeries
    poles: Tuple[tuple, ...]  # canonical keys of linear forms still inverted

    @property
    def series(self) -> TruncSeries:
        if self.poles:
            raise NonDivisible(f"expectation value keeps poles {self.poles}")
        return self.numerator


def total_energy(ops: Sequence[EOp]) -> int:
    return sum(op.energy for op in ops)


def required_budget(ops: Sequence[EOp]) -> int:
    """Largest partition size reachable: max over suffixes of -(energy sum)."""
    acc = 0
    worst = 0
    for op in reversed(ops):
        acc += op.energy
        worst = max(worst, -acc)
    return worst


def _op_vars(ops: Sequence[EOp]) -> Tuple[str, ...]:
    seen: List[str] = []
    for op in ops:
        for v in op.form.coeffs:
            if v not in seen:
                seen.append(v)
    return tuple(seen)


def _vev_tagged(ops: Sequence[EOp], vars, bound, budget) -> Dict[tuple, TruncSeries]:
    """Vacuum amplitude per multiset of 1/zeta tags (canonical form keys)."""
    branches: Dict[tuple, FockState] = {(): FockState.vacuum(vars, bound)}
    for op in reversed(ops):
        nxt: Dict[tuple, FockState] = {}
        for tag, state in branches.items():
            reg, tagged = apply_E(op, state, budget)
            if not reg.is_zero():
                _merge_branch(nxt, tag, reg)
            if tagged is not None and not tagged.is_zero():
                newtag = tuple(sorted(tag + (op.form.key(),)))
                _merge_branch(nxt, newtag, tagged)
        branches = nxt
    out: Dict[tuple, TruncSeries] = {}
    for tag, state in branches.items():
        amp = state.amps.get(())
        if amp is not None and not amp.is_zero():
            out[tag] = amp
    return out


def _merge_branch(branches, tag, state):
    cur = branches.get(tag)
    if cur is None:
        branches[tag] = state
        return
    amps = dict(cur.amps)
    for lam, amp in state.amps.items():
        v = amps.get(lam)
        v = amp if v is None else v + amp
        if v.is_zero():
            amps.pop(lam, None)
        else:
            amps[lam] = v
    branches[tag] = FockState(state.vars, state.bound, amps)


def _zetafrac_mul(f1: Dict[tuple, TruncSeries], f2: Dict[tuple, TruncSeries]
                  ) -> Dict[tuple, TruncSeries]:
    out: Dict[tuple, TruncSeries] = {}
    for t1, s1 in f1.items():
        for t2, s2 in f2.items():
            t = tuple(sorted(t1 + t2))
            v = s1 * s2
            if t in out:
                v = out[t] + v
            if not v.is_zero():
                out[t] = v
            else:
                out.pop(t, None)
    return out


def _zetafrac_normalize(zf: Dict[tuple, TruncSeries], vars, bound) -> VevResult:
    """Bring sum_tag num/prod zeta(f) over the common denominator and divide.

    zeta(f) = f * S(f): the S parts are units and always divide; each linear
    factor f is divided exactly when possible and reported as a pole
    otherwise.
    """
    if not zf:
        return VevResult(TruncSeries.zero(vars, bound), ())
    denom: Dict[tuple, int] = {}
    for tag in zf:
        counts: Dict[tuple, int] = {}
        for fkey in tag:
            counts[fkey] = counts.get(fkey, 0) + 1
        for fkey, c in counts.items():
            denom[fkey] = max(denom.get(fkey, 0), c)
    some = next(iter(zf.values()))
    total = TruncSeries.zero(some.vars, some.bound)
    for tag, num in zf.items():
        counts: Dict[tuple, int] = {}
        for fkey in tag:
            counts[fkey] = counts.get(fkey, 0) + 1
        for fkey, c in denom.items():
            form = LinearForm(dict(fkey))
            for _ in range(c - counts.get(fkey, 0)):
                num = num.mul_series_of_form(s_coefficients(num.bound), form).mul_form(form)
        total = total + num
    poles: List[tuple] = []
    inv_s = inv_s_coefficients(total.bound)
    for fkey, c in sorted(denom.items()):
        form = LinearForm(dict(fkey))
        for _ in range(c):
            total = total.mul_series_of_form(inv_s, form)
            try:
                total = total.divide_form(form)
            except NonDivisible:
                poles.append(fkey)
    return VevResult(total, tuple(poles))


def vev(ops: Sequence[EOp], bound: int, *, require_zero_energy: bool = False,
        max_size: int | None = None) -> VevResult:
    """<0| ops |0> applied right to left, as a truncated series."""
    ops = list(ops)
    vars = _op_vars(ops)
    if total_energy(ops) != 0:
        if require_zero_energy:
            raise NonZeroTotalEnergy(f"energies sum to {total_energy(ops)}")
        return VevResult(TruncSeries.zero(vars, bound), ())
    budget = required_budget(ops)
    if max_size is not None and budget > max_size:
        raise EnergyBudgetExceeded(f"needs partitions of size {budget} > {max_size}")
    n_zero = sum(1 for op in ops if op.energy == 0)
    inner = bound + n_zero
    zf = _vev_tagged(ops, vars, inner, budget)
    res = _zetafrac_normalize(zf, vars, inner)
    return VevResult(res.numerator.truncate(min(bound, res.numerator.bound)), res.poles)


def _set_partitions(items: Sequence[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def connected_vev(ops: Sequence[EOp], bound: int, *, max_size: int | None = None
                  ) -> VevResult:
    """Cumulant of the expectation value: Moebius inversion over set
    partitions of the operator slots, blocks keeping relative order."""
    ops = list(ops)
    vars = _op_vars(ops)
    if total_energy(ops) != 0:
        return VevResult(TruncSeries.zero(vars, bound), ())
    n_zero = sum(1 for op in ops if op.energy == 0)
    inner = bound + n_zero
    total: Dict[tuple, TruncSeries] = {}
    for part in _set_partitions(list(range(len(ops)))):
        if any(sum(ops[i].energy for i in block) != 0 for block in part):
            continue
        weight = Fraction((-1) ** (len(part) - 1) * _fact(len(part) - 1))
        prod: Dict[tuple, TruncSeries] = {(): TruncSeries.const(vars, inner, weight)}
        for block in part:
            sub = [ops[i] for i in sorted(block)]
            zf = _vev_tagged(sub, vars, inner, required_budget(sub))
            prod = _zetafrac_mul(prod, zf)
            if not prod:
                break
        for tag, num in prod.items():
            cur = total.get(tag)
            v = num if cur is None else cur + num
            if v.is_zero():
                total.pop(tag, None)
            else:
                total[tag] = v
    res = _zetafrac_normalize(total, vars, inner)
    return VevResult(res.numerator.truncate(min(bound, res.numerator.bound)), res.poles)


def _fact(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# -- single psi-power through the Fock space ------------------------------


def _single_psi_plain(g: int, a: Tuple[int, ...], s: int) -> Fraction:
    """All side labels nonzero: direct connected expectation value."""
    n = len(a)
    if any(a[j] == 0 for j in range(n) if j != s):
        raise ValueError("side labels must be nonzero here")
    target = 2 * g - 2 + n
    xvar = "x"
    ops: List[EOp] = []
    scale = Fraction(1)
    for j in range(n):
        if j == s or a[j] < 0:
            continue
        ops.append(EOp.alpha(a[j]))
        scale /= a[j]
    ops.append(EOp(a[s], LinearForm.var(xvar)))
    for j in range(n):
        if j == s or a[j] >= 0:
            continue
        ops.append(EOp.alpha(a[j]))
        scale /= -a[j]
    res = connected_vev(ops, target + 1)
    shift = 0
    for fkey in res.poles:
        form = dict(fkey)
        if set(form) != {xvar}:
            raise NonDivisible(f"unexpected pole in {form}")
        scale /= form[xvar]
        shift += 1
    return scale * res.numerator.coefficient((target + shift,))


def single_psi_via_wedge(g: int, a: Sequence[int], s: int) -> Fraction:
    """psi_s-power integral evaluated in the Fock space.

    Zero side labels are handled as the limit prescribes: the labels are
    moved along the sum-zero hyperplane by integer steps tau, each sample
    is an honest Fock computation, and the degree-2g polynomial in tau is
    interpolated back to tau = 0 (with one extra sample as a consistency
    check).
    """
    a = tuple(a)
    n = len(a)
    if sum(a) != 0:
        raise ValueError("labels must sum to zero")
    if not 0 <= s < n:
        raise ValueError("marked index out of range")
    if 2 * g - 3 + n < 0:
        raise DimensionError("negative psi-power")
    side_zeros = [j for j in range(n) if j != s and a[j] == 0]
    if not side_zeros:
        return _single_psi_plain(g, a, s)
    slopes = [0] * n
    for idx, j in enumerate(side_zeros):
        slopes[j] = idx + 1
    slopes[s] = -sum(slopes)
    deg = 2 * g
    taus = list(range(1, deg + 3))  # deg+1 nodes plus one checking sample
    samples = []
    for tau in taus:
        at = tuple(a[i] + slopes[i] * tau for i in range(n))
        samples.append(_single_psi_plain(g, at, s))
    val = _lagrange_at_zero(taus[:deg + 1], samples[:deg + 1])
    check = _lagrange_eval(taus[:deg + 1], samples[:deg + 1], taus[-1])
    if check != samples[-1]:
        raise NonDivisible(
            "zero-label limit is not polynomial of the expected degree")
    return val


def _lagrange_at_zero(xs: Sequence[int], ys: Sequence[Fraction]) -> Fraction:
    return _lagrange_eval(xs, ys, 0)


def _lagrange_eval(xs, ys, x0) -> Fraction:
    total = Fraction(0)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        w = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                w *= Fraction(x0 - xj, xi - xj)
        total += yi * w
    return total


# -- nested commutators and the monomial formula --------------------------


@dataclass
class CollapsedCommutator:
    """Iterated commutator of E-operators reduced to scalars times one E."""

    zeta_args: Tuple[LinearForm, ...]
    energy: int
    form: LinearForm
    central: Optional[Fraction] = None  # set for a bare pair at argument 0


Tree = object  # (energy, form) leaf or (left, right) pair


def collapse_nested_commutator(tree) -> CollapsedCommutator:
    """Collapse a commutator tree by the product rule
    [E_k(w), E_l(z)] = zeta(kz - lw) E_{k+l}(z+w)."""
    if isinstance(tree, CollapsedCommutator):
        return tree
    if isinstance(tree, EOp):
        return CollapsedCommutator((), tree.energy, tree.form)
    left, right = tree
    P = collapse_nested_commutator(left)
    Q = collapse_nested_commutator(right)
    arg = Q.form.scale(P.energy) - P.form.scale(Q.energy)
    central = None
    if P.form.is_zero() and Q.form.is_zero() and not P.zeta_args and not Q.zeta_args:
        central = Fraction(P.energy) if P.energy + Q.energy == 0 else Fraction(0)
    return CollapsedCommutator(P.zeta_args + Q.zeta_args + (arg,),
                               P.energy + Q.energy, P.form + Q.form, central)


def thm2_via_commutators(g: int, a: Sequence[int], d: Sequence[int]) -> Fraction:
    """psi-monomial against DR_g(a) through iterated commutator collapse.

    Each permutation fixing the first point contributes the collapsed
    scalar of the left-nested commutator of E_{a'_i}(z'_i) over the
    consecutive-pair denominators; the zeta(D_1) factor cancels the first
    denominator structurally, everything else is cleared and divided
    exactly, including the final division by zeta(z_1+...+z_n) coming from
    <E_0> = 1/zeta.
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
            f"{zeros} zero labels: the commutator route needs the splitting "
            "engine or the perturbed generating function")
    a_rel, d_rel = _relabel_zero_first(prob.a, prob.d)
    series = _commutator_series(g, a_rel)
    return series.coefficient(d_rel)


_COMM_CACHE: Dict[tuple, TruncSeries] = {}


def _commutator_series(g: int, a_rel: Tuple[int, ...]) -> TruncSeries:
    key = (g, a_rel)
    hit = _COMM_CACHE.get(key)
    if hit is not None:
        return hit
    n = len(a_rel)
    sum_d = 2 * g - 3 + n
    vars = _zvars(n)
    npairs = (n - 1) * (n - 2) // 2
    bound = sum_d + npairs + 3  # one extra division by u
    avals = [Fraction(x) for x in a_rel]
    series, _ = _clear_divide(avals, vars, bound,
                              _commutator_summands(avals, vars, bound),
                              honest_tail=True)
    if len(_COMM_CACHE) > 64:
        _COMM_CACHE.clear()
    _COMM_CACHE[key] = series
    return series


def _commutator_summands(avals, vars, bound):
    """Summands of the commutator form: collapse gives the zeta arguments,
    the denominators are the consecutive determinant pairs."""
    n = len(avals)
    svals = s_coefficients(bound)
    zvals = [Fraction(0)] + svals[:-1]
    for sigma in itertools.permutations(range(1, n)):
        order = (0,) + sigma
        tree = EOp(int(avals[order[0]]), LinearForm.var(vars[order[0]]))
        for pos in range(1, n):
            tree = (tree, EOp(int(avals[order[pos]]), LinearForm.var(vars[order[pos]])))
        col = collapse_nested_commutator(tree)
        exps = [0] * n
        for pos in range(1, n - 1):
            exps[order[pos]] += 1
        acc = TruncSeries.monomial(vars, bound, tuple(exps), 1)
        sign = 1
        residual = []
        skip = False
        for step, arg in enumerate(col.zeta_args, start=1):
            if step == 1:
                acc = acc.mul_series_of_form(svals, arg)  # zeta(D_1)/delta_1
            else:
                if arg.is_zero():
                    skip = True
                    break
                acc = acc.mul_series_of_form(zvals, arg)
            if step >= 2:
                i, j = order[step - 1], order[step]
                if i > j:
                    i, j = j, i
                    sign = -sign
                residual.append((i, j))
        if skip:
            continue
        if sign < 0:
            acc = acc.scale(-1)
        yield acc, frozenset(residual)


# -- characters and the identity resolution --------------------------------


def character(lam: Sequence[int], nu: Sequence[int]) -> int:
    """Symmetric-group character chi_lambda(nu) as the v_lambda coefficient
    of prod alpha_{-nu_i} |0>."""
    lam, nu = tuple(lam), tuple(nu)
    if sum(lam) != sum(nu):
        return 0
    state = FockState.vacuum((), 0)
    for part in nu:
        state, _ = apply_E(EOp.alpha(-part), state)
    amp = state.amps.get(lam)
    if amp is None:
        return 0
    c = amp.constant_term()
    return int(c)


def identity_resolution_check(N: int, a_ops: Sequence[EOp], b_ops: Sequence[EOp],
                              bound: int) -> bool:
    """Insert the identity as a sum over alpha-created states of size <= N
    between the two operator groups and compare with the direct value."""
    lhs = vev(list(a_ops) + list(b_ops), bound).series
    vars = lhs.vars
    rhs = TruncSeries.zero(vars, lhs.bound)
    for nu in partitions_upto(N):
        mid_create = [EOp.alpha(-p) for p in nu]
        mid_annih = [EOp.alpha(p) for p in nu]
        left = vev(list(a_ops) + mid_create, bound).series
        if left.is_zero():
            continue
        right = vev(mid_annih + list(b_ops), bound).series
        if right.is_zero():
            continue
        contrib = _align(left, vars, lhs.bound) * _align(right, vars, lhs.bound)
        rhs = rhs + contrib.scale(Fraction(1, cycle_type_order(nu)))
    return lhs == rhs


def _align(series: TruncSeries, vars: Tuple[str, ...], bound: int) -> TruncSeries:
    """Re-express a series over a superset variable tuple."""
    if series.vars == vars and series.bound == bound:
        return series
    pos = {v: vars.index(v) for v in series.vars}
    terms = {}
    for e, c in series.terms.items():
        if sum(e) > bound:
            continue
        ne = [0] * len(vars)
        for i, v in enumerate(series.vars):
            ne[pos[v]] = e[i]
        terms[tuple(ne)] = c
    return TruncSeries(vars, bound, terms)
