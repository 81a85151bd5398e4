"""Weight families: infinite stochastic vectors with certified series bounds.

A weight family is a sequence of positive weights q_0, q_1, ... summing to 1.
Each built-in family knows closed forms or integral-test brackets for

  * its plain tail            sum_{i >= k} q_i,
  * its power-sum tail        sum_{i >= k} q_i^x   for x in [0, 1],
  * power sums over finite
    contiguous index blocks   sum_{a <= i < b} q_i^x.

All bounds are directed: the reported (lower, upper) pair always encloses the
true value, with a small relative pad absorbing floating-point rounding.  When
a power-sum tail provably diverges, the lower bound is a large finite sentinel
(any finite number is a valid lower bound of +inf) so that comparisons against
1 resolve immediately.

Built-in families:

  luroth        q_i = 1/((i+1)(i+2))           (telescoping, tail = 1/(k+1))
  geometric(r)  q_i = (1-r) r^i                (all sums in closed form)
  golden        q_i = phi^-(i+2)               (= geometric with r = 1/phi)
  loglog        q_i = A/((i+2) ln^2(i+2))      (A normalizes; power sums
                                                diverge for every x < 1)
  explicit      finite list of weights, optionally continued by a geometric
                tail carrying the remaining mass
"""

from __future__ import annotations

import math

import numpy as np

from .errors import FamilyParameterError, NormalizationError

# Relative pad applied to closed-form bounds so that rounding of the closed
# form itself cannot violate directedness (a few ulps per arithmetic step).
_PAD = 2e-15

# Finite stand-in lower bound for a provably divergent tail.  The true tail is
# +inf, so any finite value is valid; a huge one lets "is the sum >= 1?"
# comparisons resolve without summing terms.
DIVERGENT_LOWER = 1e300

# Panel count used by convexity-based block brackets unless overridden.
DEFAULT_BLOCK_PANELS = 4096


def _pad_down(v: float) -> float:
    return v - abs(v) * _PAD


def _pad_up(v: float) -> float:
    return v + abs(v) * _PAD + 5e-324


def _directed(lower: float, upper: float) -> tuple[float, float]:
    """Pad a (lower, upper) pair outward; reorder if rounding inverted it."""
    lo, hi = _pad_down(lower), _pad_up(upper)
    if lo > hi:
        lo, hi = _pad_down(upper), _pad_up(lower)
    return lo, hi


def _convex_sum_bounds(g, a: int, b: int, panels: int) -> tuple[float, float]:
    """Bounds on sum_{i=a}^{b} g(i) for g convex and decreasing on [a-1/2, b+1/2].

    g must be vectorized over float arrays.  Lower bound: midpoint rule
    under-integrates a convex function on [a, b], plus the trapezoid end
    correction (h(a)+h(b))/2.  Upper bound: the midpoint inequality bounds the
    sum by the integral over [a-1/2, b+1/2], which the trapezoid rule
    over-integrates.  Panels are geometrically spaced so relative resolution is
    uniform across index magnitudes.
    """
    lo_t, hi_t = float(a), float(b)
    # Grid in s = t + 2 keeps nodes positive and geometric spacing sensible
    # even when a == 0 (or the half-shifted a - 1/2).
    nodes = np.exp(np.linspace(math.log(lo_t + 2.0), math.log(hi_t + 2.0), panels + 1)) - 2.0
    nodes[0], nodes[-1] = lo_t, hi_t
    widths = np.diff(nodes)
    mids = 0.5 * (nodes[:-1] + nodes[1:])
    lower = float(np.dot(g(mids), widths)) + 0.5 * (float(g(np.array([lo_t]))[0]) + float(g(np.array([hi_t]))[0]))

    nodes2 = np.exp(np.linspace(math.log(lo_t + 1.5), math.log(hi_t + 2.5), panels + 1)) - 2.0
    nodes2[0], nodes2[-1] = lo_t - 0.5, hi_t + 0.5
    gv = g(nodes2)
    upper = float(np.dot(0.5 * (gv[:-1] + gv[1:]), np.diff(nodes2)))
    return _directed(lower, upper)


class WeightFamily:
    """Base interface; concrete families fill in the analytics.

    Instances are immutable after construction, and every method is a pure
    function of its arguments, so families may be shared freely across
    threads.
    """

    kind: str = "?"
    #: Number of indices with positive weight, or None for an infinite alphabet.
    alphabet_size: int | None = None
    #: Infimum of {x : sum q_i^x converges}; tails diverge for x below it.
    convergence_infimum: float = 0.0

    def weight(self, i: int) -> float:
        raise NotImplementedError

    def weight_block(self, a: int, b: int) -> np.ndarray:
        """Weights q_a, ..., q_{b-1} as a float64 array."""
        raise NotImplementedError

    def power_block(self, a: int, b: int, x: float) -> np.ndarray:
        """q_i^x for a <= i < b."""
        return self.weight_block(a, b) ** x

    @property
    def q_max(self) -> float:
        raise NotImplementedError

    def tail_sum_from(self, k: int) -> float:
        """Exact value or upper bound on sum_{i >= k} q_i."""
        raise NotImplementedError

    def tail_power_bounds(self, k: int, x: float) -> tuple[float, float]:
        """Directed bounds on sum_{i >= k} q_i^x, upper possibly +inf."""
        raise NotImplementedError

    def block_power_bounds(self, a: int, b: int, x: float,
                           panels: int = DEFAULT_BLOCK_PANELS) -> tuple[float, float]:
        """Directed bounds on sum_{a <= i < b} q_i^x (half-open block)."""
        raise NotImplementedError

    def total_mass_bounds(self, budget: int = 10 ** 6) -> tuple[float, float]:
        """Directed bounds on sum of all weights (should enclose 1)."""
        m = self.alphabet_size
        n = budget if m is None else min(budget, m)
        partial = float(self.weight_block(0, n).sum())
        t_lo, t_hi = self.tail_power_bounds(n, 1.0)
        return _pad_down(partial) + t_lo, _pad_up(partial) + t_hi

    def _exact_block(self, a: int, b: int, x: float) -> tuple[float, float]:
        s = float(self.power_block(a, b, x).sum())
        return _pad_down(s), _pad_up(s)


class LurothWeights(WeightFamily):
    """q_i = 1/((i+1)(i+2)); the classical Luroth expansion weights.

    The plain tail telescopes to exactly 1/(k+1).  Power sums converge for
    x > 1/2 only; on that range the term function h(t) = ((t+1)(t+2))^-x is
    convex and decreasing, and (t+1)(t+2) = (t+1.5)^2 - 0.25 gives elementary
    integral majorants/minorants.
    """

    kind = "luroth"
    convergence_infimum = 0.5

    def weight(self, i: int) -> float:
        return 1.0 / ((i + 1.0) * (i + 2.0))

    def weight_block(self, a: int, b: int) -> np.ndarray:
        i = np.arange(a, b, dtype=np.float64)
        return 1.0 / ((i + 1.0) * (i + 2.0))

    @property
    def q_max(self) -> float:
        return 0.5

    def tail_sum_from(self, k: int) -> float:
        return 1.0 / (k + 1.0)

    def _power_term(self, x: float):
        return lambda t: ((t + 1.0) * (t + 2.0)) ** (-x)

    def tail_power_bounds(self, k: int, x: float) -> tuple[float, float]:
        if x == 1.0:
            t = 1.0 / (k + 1.0)
            return _pad_down(t), _pad_up(t)
        if x <= 0.5:
            return DIVERGENT_LOWER, math.inf
        # integral of (t+1.5)^(-2x) from y to infinity
        def ival(y: float) -> float:
            return (y + 1.5) ** (1.0 - 2.0 * x) / (2.0 * x - 1.0)
        h_k = ((k + 1.0) * (k + 2.0)) ** (-x)
        lower = ival(k) + 0.5 * h_k
        # (t+1)(t+2) = (t+1.5)^2 - 0.25, so h(t) <= corr(y) * (t+1.5)^(-2x)
        # for t >= y, with the correction largest at the left endpoint.
        corr = (1.0 - 0.25 / (k + 1.0) ** 2) ** (-x)
        upper = corr * ival(k - 0.5)
        return _directed(lower, upper)

    def block_power_bounds(self, a: int, b: int, x: float,
                           panels: int = DEFAULT_BLOCK_PANELS) -> tuple[float, float]:
        if b <= a:
            return 0.0, 0.0
        if x == 0.0:
            n = float(b - a)
            return n, n
        if b - a <= 1 << 16:
            return self._exact_block(a, b, x)
        return _convex_sum_bounds(self._power_term(x), a, b - 1, panels)


class GeometricWeights(WeightFamily):
    """q_i = (1-r) r^i for a ratio r in (0, 1); every sum here is closed-form."""

    kind = "geometric"
    convergence_infimum = 0.0

    def __init__(self, ratio: float):
        if not (isinstance(ratio, (int, float)) and 0.0 < ratio < 1.0):
            raise FamilyParameterError(f"ratio must lie in (0, 1), got {ratio!r}")
        self.ratio = float(ratio)

    def weight(self, i: int) -> float:
        # np.power, not **: keeps scalar and block values bit-identical
        return (1.0 - self.ratio) * float(np.power(self.ratio, float(i)))

    def weight_block(self, a: int, b: int) -> np.ndarray:
        i = np.arange(a, b, dtype=np.float64)
        return (1.0 - self.ratio) * np.power(self.ratio, i)

    @property
    def q_max(self) -> float:
        return 1.0 - self.ratio

    def tail_sum_from(self, k: int) -> float:
        return self.ratio ** k

    def _power_tail(self, k: int, x: float) -> float:
        # sum_{i>=k} ((1-r) r^i)^x = (1-r)^x r^(kx) / (1 - r^x)
        log_num = x * math.log1p(-self.ratio) + k * x * math.log(self.ratio)
        denom = -math.expm1(x * math.log(self.ratio))
        return math.exp(log_num) / denom

    def tail_power_bounds(self, k: int, x: float) -> tuple[float, float]:
        if x == 0.0:
            return DIVERGENT_LOWER, math.inf
        v = self._power_tail(k, x)
        return _pad_down(v), _pad_up(v)

    def block_power_bounds(self, a: int, b: int, x: float,
                           panels: int = DEFAULT_BLOCK_PANELS) -> tuple[float, float]:
        if b <= a:
            return 0.0, 0.0
        if x == 0.0:
            n = float(b - a)
            return n, n
        v = self._power_tail(a, x) - self._power_tail(b, x)
        return _pad_down(v), _pad_up(v)


class GoldenWeights(GeometricWeights):
    """q_i = phi^-(i+2) with phi the golden ratio.

    Equals the geometric family with ratio 1/phi, since 1 - 1/phi = phi^-2.
    """

    kind = "golden"

    def __init__(self):
        super().__init__(2.0 / (1.0 + math.sqrt(5.0)))


class LogLogWeights(WeightFamily):
    """q_i = A / ((i+2) ln^2(i+2)) with A the normalizing constant.

    The normalizer is computed once at construction by summing TERMS exact
    terms and bracketing the remainder between the integral bounds
    1/ln(k+2) + f(k)/2 and 1/ln(k+1.5) (midpoint/trapezoid rules for the
    convex decreasing f(t) = 1/((t+2) ln^2(t+2))).  The bracket width is
    recorded in ``normalizer_bracket``; with 10^6 terms it is below 1e-15.

    Power sums sum q_i^x diverge for every x < 1 (the integrand decays like
    t^-x times a slowly varying factor), which is what makes this family the
    canonical no-root example.
    """

    kind = "loglog"
    convergence_infimum = 1.0
    TERMS = 10 ** 6

    def __init__(self):
        i = np.arange(self.TERMS, dtype=np.float64)
        t = i + 2.0
        partial = float((1.0 / (t * np.log(t) ** 2)).sum())
        m = float(self.TERMS)
        f_m = 1.0 / ((m + 2.0) * math.log(m + 2.0) ** 2)
        s_lo = partial + 1.0 / math.log(m + 2.0) + 0.5 * f_m
        s_hi = partial + 1.0 / math.log(m + 1.5)
        self._norm = 2.0 / (s_lo + s_hi)
        self.normalizer_bracket = (1.0 / s_hi, 1.0 / s_lo)

    def weight(self, i: int) -> float:
        return self._norm / ((i + 2.0) * math.log(i + 2.0) ** 2)

    def weight_block(self, a: int, b: int) -> np.ndarray:
        t = np.arange(a, b, dtype=np.float64) + 2.0
        return self._norm / (t * np.log(t) ** 2)

    @property
    def q_max(self) -> float:
        return self.weight(0)

    def tail_sum_from(self, k: int) -> float:
        return _pad_up(self._norm / math.log(k + 1.5))

    def _power_term(self, x: float):
        a_x = self._norm ** x

        def g(t: np.ndarray) -> np.ndarray:
            s = t + 2.0
            return a_x * (s * np.log(s) ** 2) ** (-x)

        return g

    def tail_power_bounds(self, k: int, x: float) -> tuple[float, float]:
        if x < 1.0:
            return DIVERGENT_LOWER, math.inf
        f_k = 1.0 / ((k + 2.0) * math.log(k + 2.0) ** 2)
        lower = self._norm * (1.0 / math.log(k + 2.0) + 0.5 * f_k)
        upper = self._norm / math.log(k + 1.5)
        return _directed(lower, upper)

    def block_power_bounds(self, a: int, b: int, x: float,
                           panels: int = DEFAULT_BLOCK_PANELS) -> tuple[float, float]:
        if b <= a:
            return 0.0, 0.0
        if x == 0.0:
            n = float(b - a)
            return n, n
        if b - a <= 1 << 16:
            return self._exact_block(a, b, x)
        return _convex_sum_bounds(self._power_term(x), a, b - 1, panels)


class ExplicitWeights(WeightFamily):
    """A finite list of weights, optionally continued by a geometric tail.

    Without ``tail_ratio`` the listed values must carry all the mass (finite
    alphabet); with it, the remaining mass 1 - sum(values) is spread as
    c * tail_ratio^j with c = (1 - sum(values)) (1 - tail_ratio).  Listed
    values are renormalized by their exact float sum so the stochastic-vector
    invariant holds to machine precision; inputs off by more than ``mass_tol``
    are rejected instead.
    """

    kind = "explicit"
    convergence_infimum = 0.0

    def __init__(self, values, tail_ratio: float | None = None,
                 mass_tol: float = 1e-9, check_mass: bool = True):
        vals = np.asarray(list(values), dtype=np.float64)
        if vals.size == 0:
            raise FamilyParameterError("values must be a nonempty list of weights")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise FamilyParameterError("values must all be positive finite numbers")
        if tail_ratio is not None and not (0.0 < tail_ratio < 1.0):
            raise FamilyParameterError(f"tail_ratio must lie in (0, 1), got {tail_ratio!r}")
        total = float(vals.sum())
        if tail_ratio is None:
            if check_mass:
                if abs(total - 1.0) > mass_tol:
                    raise NormalizationError(
                        f"values sum to {total!r}, which differs from 1 beyond tolerance {mass_tol}")
                vals = vals / total
            self.alphabet_size = int(vals.size)
            self._tail_scale = 0.0
        else:
            if check_mass and not total < 1.0 - 1e-15:
                raise NormalizationError(
                    f"values sum to {total!r}; a geometric tail requires them to sum below 1")
            self.alphabet_size = None
            self._tail_scale = (1.0 - total) * (1.0 - tail_ratio)
        self.values = vals
        self.tail_ratio = tail_ratio
        self._listed = int(vals.size)

    def weight(self, i: int) -> float:
        if i < self._listed:
            return float(self.values[i])
        if self.tail_ratio is None:
            raise IndexError(f"index {i} outside finite alphabet of size {self._listed}")
        return self._tail_scale * float(np.power(self.tail_ratio, float(i - self._listed)))

    def weight_block(self, a: int, b: int) -> np.ndarray:
        if self.tail_ratio is None and b > self._listed:
            raise IndexError(f"block [{a}, {b}) outside finite alphabet of size {self._listed}")
        out = np.empty(max(b - a, 0), dtype=np.float64)
        head = max(min(b, self._listed) - a, 0)
        if head > 0:
            out[:head] = self.values[a:a + head]
        if b - a > head:
            j = np.arange(max(a, self._listed), b, dtype=np.float64) - self._listed
            out[head:] = self._tail_scale * np.power(self.tail_ratio, j)
        return out

    @property
    def q_max(self) -> float:
        top = float(self.values.max())
        if self.tail_ratio is not None:
            top = max(top, self._tail_scale)
        return top

    def _geo_power_tail(self, j: int, x: float) -> float:
        # sum_{i>=j} (c rho^i)^x over the tail part, j counted from the tail start
        if self._tail_scale == 0.0:
            return 0.0
        rho = self.tail_ratio
        log_num = x * math.log(self._tail_scale) + j * x * math.log(rho)
        return math.exp(log_num) / -math.expm1(x * math.log(rho))

    def tail_sum_from(self, k: int) -> float:
        if k >= self._listed:
            if self.tail_ratio is None:
                return 0.0
            return self._tail_scale * self.tail_ratio ** (k - self._listed) / (1.0 - self.tail_ratio)
        head = float(self.values[k:].sum())
        if self.tail_ratio is None:
            return head
        return head + (1.0 - float(self.values.sum()))

    def tail_power_bounds(self, k: int, x: float) -> tuple[float, float]:
        if self.tail_ratio is None:
            if k >= self._listed:
                return 0.0, 0.0
            return self._exact_block(k, self._listed, x)
        if x == 0.0:
            return DIVERGENT_LOWER, math.inf
        head = float((self.values[k:] ** x).sum()) if k < self._listed else 0.0
        tail = self._geo_power_tail(max(k - self._listed, 0), x)
        return _pad_down(head + tail), _pad_up(head + tail)

    def block_power_bounds(self, a: int, b: int, x: float,
                           panels: int = DEFAULT_BLOCK_PANELS) -> tuple[float, float]:
        if b <= a:
            return 0.0, 0.0
        if x == 0.0:
            n = float(b - a)
            return n, n
        head_hi = min(b, self._listed)
        total = float((self.values[a:head_hi] ** x).sum()) if a < self._listed else 0.0
        if b > self._listed:
            total += (self._geo_power_tail(max(a - self._listed, 0), x)
                      - self._geo_power_tail(b - self._listed, x))
        return _pad_down(total), _pad_up(total)


_FAMILY_KINDS = ("luroth", "geometric", "golden", "loglog", "explicit")


def make_family(kind: str, *, ratio: float | None = None, values=None,
                tail_ratio: float | None = None) -> WeightFamily:
    """Construct a weight family by kind name, validating parameters.

    Raises FamilyParameterError (naming the offending field) for bad
    parameters, NormalizationError for explicit weights with bad total mass.
    """
    if kind == "luroth":
        return LurothWeights()
    if kind == "geometric":
        if ratio is None:
            raise FamilyParameterError("geometric family requires a ratio")
        return GeometricWeights(ratio)
    if kind == "golden":
        return GoldenWeights()
    if kind == "loglog":
        return LogLogWeights()
    if kind == "explicit":
        if values is None:
            raise FamilyParameterError("explicit family requires values")
        return ExplicitWeights(values, tail_ratio=tail_ratio)
    raise FamilyParameterError(f"unknown family kind {kind!r}; expected one of {_FAMILY_KINDS}")
