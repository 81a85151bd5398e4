"""Hausdorff dimension of digit-restricted sets.

For a weight family Q and a digit set V, the dimension of the set of numbers
whose digits all lie in V is governed by the power sum F(x) = sum_{i in V}
q_i^x, strictly decreasing in x:

  * finite V: the dimension is the unique root of F(x) = 1 on [0, 1]
    (``moran_root_finite``);
  * countable V with a root on [0, 1]: the root is the dimension
    (``dim_root``);
  * countable V without a root: the dimension is the limit of the roots for
    the truncations V_k = first k members (``dim_limit``);
  * always: the dimension equals sup{x : F(x) >= 1} (``dim_sup``), the
    default route, with every comparison against 1 certified by two-sided
    series bounds rather than heuristic truncation.

``dim_hausdorff`` dispatches between the routes.  All functions are pure and
deterministic for fixed inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (IndecisiveBoundError, NoRootError, RouteDisagreementError)
from .families import WeightFamily
from .support import SupportSet

#: Term budgets tried in turn when deciding whether a power sum is >= 1.
DEFAULT_BUDGETS = tuple(1 << p for p in range(10, 25))

#: Panel counts tried in turn by certified block brackets.
_PANEL_LADDER = (1 << 12, 1 << 14, 1 << 16)

#: Relative pad absorbing floating-point error of exact partial sums.
_SUM_PAD = 1e-13

DEFAULT_TOL_FINITE = 1e-10
DEFAULT_TOL_COUNTABLE = 1e-8


@dataclass(frozen=True)
class SeriesBound:
    """Two-sided bound on a power sum; upper may be +inf, lower is finite."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (math.isfinite(self.lower) and self.lower <= self.upper):
            raise ValueError(f"invalid series bound [{self.lower}, {self.upper}]")


@dataclass(frozen=True)
class DimensionResult:
    """A dimension value with its route tag, bracket and work counter."""

    value: float
    method: str  # "finite_root" | "root" | "limit" | "sup"
    bracket: tuple[float, float]
    evaluations: int
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "bracket": [self.bracket[0], self.bracket[1]],
            "evaluations": self.evaluations,
            "flags": list(self.flags),
        }


def _coerce_support(v) -> SupportSet:
    if isinstance(v, SupportSet):
        return v
    return SupportSet.finite(v)


def _effective(family: WeightFamily, v: SupportSet):
    """Resolve V against the family alphabet: ("finite", members) or ("infinite", V)."""
    m = family.alphabet_size
    if v.kind == "finite":
        members = tuple(i for i in v.indices if m is None or i < m)
        if not members:
            raise ValueError("support set has no members within the family alphabet")
        return "finite", members
    if m is not None:
        members = tuple(v.iter_members(m))
        if not members:
            raise ValueError("support set has no members within the family alphabet")
        return "finite", members
    return "infinite", v


def _index_bound_for(v: SupportSet, count: int) -> int:
    """Smallest K such that exactly ``count`` members of V lie below K."""
    if v.kind == "all":
        return count
    k = count
    for e in v.indices:  # ascending
        if e < k:
            k += 1
    return k


def power_sum_bounds(family: WeightFamily, v: SupportSet, x: float,
                     budget: int) -> SeriesBound:
    """Directed bounds on sum_{i in V} q_i^x from a budgeted partial sum.

    The lower bound is the (padded) partial sum over the first ``budget``
    enumerated members plus the family's certified tail minorant; the upper
    bound adds the tail majorant, adjusted for excluded indices when V is
    cofinite.  A divergent tail yields upper = +inf.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"exponent must lie in [0, 1], got {x}")
    kind, data = _effective(family, v)
    if kind == "finite":
        members = data[:budget]
        s = sum(family.weight(i) ** x for i in members)
        if len(data) <= budget:
            return SeriesBound(s * (1.0 - _SUM_PAD), s * (1.0 + _SUM_PAD))
        rest = sum(family.weight(i) ** x for i in data[budget:])
        return SeriesBound(s * (1.0 - _SUM_PAD),
                           (s + rest) * (1.0 + _SUM_PAD))

    k_bound = _index_bound_for(v, budget)
    partial = float(family.power_block(0, k_bound, x).sum())
    excl_below = [e for e in v.indices if e < k_bound]
    if excl_below:
        partial -= sum(family.weight(e) ** x for e in excl_below)
    t_lo, t_hi = family.tail_power_bounds(k_bound, x)
    excl_beyond = sum(family.weight(e) ** x for e in v.indices if e >= k_bound)
    if excl_beyond:
        t_lo = max(t_lo - excl_beyond * (1.0 + _SUM_PAD), 0.0)
        if math.isfinite(t_hi):
            t_hi = max(t_hi - excl_beyond * (1.0 - _SUM_PAD), 0.0)
    return SeriesBound(partial * (1.0 - _SUM_PAD) + t_lo,
                       partial * (1.0 + _SUM_PAD) + t_hi)


class _Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


def _root_exact(logq: np.ndarray, tol: float, counter: _Counter,
                lo: float = 0.0) -> tuple[float, float, float]:
    """Bisect the root of sum exp(x log q_i) = 1; returns (value, lo, hi)."""

    def f(x: float) -> float:
        counter.n += 1
        return float(np.exp(x * logq).sum())

    if f(1.0) >= 1.0:
        return 1.0, 1.0, 1.0
    hi = 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) >= 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), lo, hi


def moran_root_finite(family: WeightFamily, v, tol: float = DEFAULT_TOL_FINITE) -> DimensionResult:
    """Dimension of a finitely-restricted digit set: the root of the Moran sum.

    For a single-index set the dimension is 0 (a point).  The root always
    exists since F(0) = |V| >= 1 and F(1) <= 1.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    kind, members = _effective(family, _coerce_support(v))
    if kind != "finite":
        raise ValueError("moran_root_finite requires a finite support set")
    if len(members) == 1:
        return DimensionResult(0.0, "finite_root", (0.0, 0.0), 0)
    counter = _Counter()
    logq = np.log(np.array([family.weight(i) for i in members]))
    value, lo, hi = _root_exact(logq, tol, counter)
    return DimensionResult(value, "finite_root", (lo, hi), counter.n)


def _members_upto(family: WeightFamily, v: SupportSet, count: int) -> np.ndarray:
    k_bound = _index_bound_for(v, count)
    idx = np.arange(k_bound)
    if v.kind == "cofinite":
        excl = [e for e in v.indices if e < k_bound]
        if excl:
            idx = np.delete(idx, excl)
    return idx


_EXACT_TRUNCATION = 1 << 16


def _truncation_root_bounded(family: WeightFamily, v: SupportSet, count: int,
                             tol: float, counter: _Counter,
                             lo: float = 0.0) -> tuple[float, float, float]:
    """Root of the truncation sum for huge truncations, via certified block
    brackets (exact head + convexity-bracketed contiguous block).

    If at some midpoint the bracket cannot separate the sum from 1 even at the
    finest panel ladder, the current (still valid) bisection bracket is
    returned; its width may then exceed tol.
    """
    k_bound = _index_bound_for(v, count)
    max_excl = v.indices[-1] + 1 if v.indices else 0
    head_end = min(k_bound, max(_EXACT_TRUNCATION, max_excl))
    head_w = family.weight_block(0, head_end)
    if v.kind == "cofinite":
        keep = np.ones(head_end, dtype=bool)
        for e in v.indices:
            if e < head_end:
                keep[e] = False
        head_w = head_w[keep]
    head_logw = np.log(head_w)

    def bounds(x: float, panels: int) -> tuple[float, float]:
        counter.n += 1
        head = float(np.exp(x * head_logw).sum())
        b_lo, b_hi = family.block_power_bounds(head_end, k_bound, x, panels)
        return head * (1.0 - _SUM_PAD) + b_lo, head * (1.0 + _SUM_PAD) + b_hi

    hi = 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        decided = None
        for panels in _PANEL_LADDER:
            b_lo, b_hi = bounds(mid, panels)
            if b_lo >= 1.0:
                decided = True
                break
            if b_hi < 1.0:
                decided = False
                break
        if decided is None:
            break  # root within bracket resolution of mid; keep valid bracket
        if decided:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), lo, hi


def truncation_roots(family: WeightFamily, v: SupportSet, ks,
                     tol: float = 1e-10) -> list[tuple[int, float]]:
    """Roots of the truncation sums for each k in ks (ascending).

    Exact sums are used up to 2^16 members; larger truncations fall back to
    certified block brackets.  Successive roots reuse the previous root as the
    bisection floor (the sequence is strictly increasing).
    """
    v = _coerce_support(v)
    counter = _Counter()
    out: list[tuple[int, float]] = []
    floor = 0.0
    for k in sorted(ks):
        if k < 1:
            raise ValueError("truncation sizes must be >= 1")
        if k == 1:
            out.append((1, 0.0))
            continue
        if k <= _EXACT_TRUNCATION:
            idx = _members_upto(family, v, k)
            logq = np.log(family.weight_block(0, int(idx[-1]) + 1)[idx])
            value, lo, _ = _root_exact(logq, tol, counter, lo=floor)
        else:
            value, lo, _ = _truncation_root_bounded(family, v, k, tol, counter, lo=floor)
        floor = lo
        out.append((k, value))
    return out


def dim_sup(family: WeightFamily, v, tol: float = DEFAULT_TOL_COUNTABLE,
            budgets=DEFAULT_BUDGETS) -> DimensionResult:
    """Dimension as sup{x : power sum >= 1}, the route valid for every V.

    Comparisons against 1 are decided by certified bounds, escalating the term
    budget along ``budgets``; exhaustion raises IndecisiveBoundError (the sum
    is then indistinguishable from 1 at the test point).
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    v = _coerce_support(v)
    kind, data = _effective(family, v)
    counter = _Counter()
    if kind == "finite":
        members = data
        if len(members) == 1:
            return DimensionResult(0.0, "sup", (0.0, 0.0), 0)
        m = family.alphabet_size
        if m is not None and len(members) == m:
            # Full alphabet: the sum at x = 1 is exactly the total mass 1.
            return DimensionResult(1.0, "sup", (1.0, 1.0), 0)
        logq = np.log(np.array([family.weight(i) for i in members]))
        value, lo, hi = _root_exact(logq, tol, counter)
        return DimensionResult(value, "sup", (lo, hi), counter.n)

    if v.kind == "all":
        # Stochastic vector: the power sum at x = 1 is exactly 1.
        return DimensionResult(1.0, "sup", (1.0, 1.0), 0)

    def at_least_one(x: float) -> bool:
        for budget in budgets:
            counter.n += 1
            b = power_sum_bounds(family, v, x, budget)
            if b.lower >= 1.0:
                return True
            if b.upper < 1.0:
                return False
        raise IndecisiveBoundError(
            f"series bounds straddle 1 at x={x!r} even at the largest budget; "
            f"tighten tol or extend the budget schedule")

    lo, hi = 0.0, 1.0  # F(0) = infinity >= 1; F(1) < 1 strictly (V cofinite)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if at_least_one(mid):
            lo = mid
        else:
            hi = mid
    return DimensionResult(0.5 * (lo + hi), "sup", (lo, hi), counter.n)


def dim_root(family: WeightFamily, v, tol: float = DEFAULT_TOL_COUNTABLE,
             budgets=DEFAULT_BUDGETS) -> DimensionResult:
    """Dimension as the root of the power-sum equation, when one exists.

    Raises NoRootError in the no-root regime (the sum exceeds 1 for every
    x < 1 while falling short at x = 1), where the truncation-limit or sup
    routes apply instead.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    v = _coerce_support(v)
    kind, data = _effective(family, v)
    if kind == "finite":
        res = moran_root_finite(family, SupportSet.finite(data), tol)
        return DimensionResult(res.value, "root", res.bracket, res.evaluations)
    if v.kind == "all":
        return DimensionResult(1.0, "root", (1.0, 1.0), 0)
    # V is cofinite with at least one exclusion, so F(1) < 1 strictly.
    if family.convergence_infimum >= 1.0:
        raise NoRootError(
            "power sums over this family diverge for every x < 1 while the sum "
            "at x = 1 falls short of 1: the equation has no root on [0, 1]; "
            "use dim_sup or dim_limit")
    res = dim_sup(family, v, tol, budgets)
    return DimensionResult(res.value, "root", res.bracket, res.evaluations)


def _k_schedule(k_max: int) -> list[int]:
    ks = list(range(2, min(17, k_max + 1)))
    k = 32
    while k < k_max:
        ks.append(k)
        k *= 2
    if k_max >= 2 and (not ks or ks[-1] != k_max):
        ks.append(k_max)
    return ks


def dim_limit(family: WeightFamily, v, tol: float = DEFAULT_TOL_COUNTABLE,
              k_max: int = 4096) -> DimensionResult:
    """Dimension as the limit of truncation roots (the no-root regime route).

    Evaluates the strictly increasing truncation roots along a schedule that
    is consecutive for small k and doubling beyond (evaluating every k up to
    the sizes this route needs is computationally impossible), stopping once
    consecutive evaluated roots differ by less than tol/4 AND the sup-route
    bracket confirms the root is within tol of the limit.  If the cap k_max is
    reached first, the last root is returned flagged "SlowConvergence".
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    if k_max < 2:
        raise ValueError("k_max must be at least 2")
    v = _coerce_support(v)
    kind, data = _effective(family, v)
    counter = _Counter()
    if kind == "finite":
        size = len(data)
        if size <= k_max:
            # The truncation sequence stabilizes at k = |V|.
            res = moran_root_finite(family, SupportSet.finite(data), tol)
            return DimensionResult(res.value, "limit", res.bracket, res.evaluations)
        members = data[:k_max]
        res = moran_root_finite(family, SupportSet.finite(members), tol)
        return DimensionResult(res.value, "limit", res.bracket, res.evaluations,
                               ("SlowConvergence",))
    sup = dim_sup(family, v, tol)
    counter.n += sup.evaluations

    prev_value = None
    value = lo = 0.0
    for k in _k_schedule(k_max):
        if k <= _EXACT_TRUNCATION:
            idx = _members_upto(family, v, k)
            logq = np.log(family.weight_block(0, int(idx[-1]) + 1)[idx])
            value, lo, _ = _root_exact(logq, tol / 8.0, counter, lo=lo)
        else:
            value, lo, _ = _truncation_root_bounded(family, v, k, tol / 8.0, counter, lo=lo)
        if (prev_value is not None and value - prev_value < tol / 4.0
                and sup.bracket[1] - lo <= tol):
            return DimensionResult(min(value, sup.bracket[1]), "limit",
                                   (lo, sup.bracket[1]), counter.n)
        prev_value = value
    return DimensionResult(value, "limit", (lo, sup.bracket[1]), counter.n,
                           ("SlowConvergence",))


def dim_hausdorff(family: WeightFamily, v, tol: float | None = None,
                  cross_check: bool = True) -> DimensionResult:
    """Dimension of the digit-restricted set, dispatching between the routes.

    Finite support sets go to the Moran root; countable ones to the sup route,
    cross-checked against a budget-capped truncation-limit run when the latter
    converges.  Disagreement beyond 2 tol raises RouteDisagreementError (an
    internal-consistency failure, not an input error).
    """
    v = _coerce_support(v)
    kind, _ = _effective(family, v)
    if tol is None:
        tol = DEFAULT_TOL_FINITE if kind == "finite" else DEFAULT_TOL_COUNTABLE
    if kind == "finite":
        return moran_root_finite(family, v, tol)
    res = dim_sup(family, v, tol)
    if cross_check:
        lim = dim_limit(family, v, tol, k_max=512)
        if "SlowConvergence" not in lim.flags and abs(res.value - lim.value) > 2.0 * tol:
            raise RouteDisagreementError(
                f"sup route gave {res.value!r} but the truncation limit gave "
                f"{lim.value!r} (tol {tol!r})")
    return res
