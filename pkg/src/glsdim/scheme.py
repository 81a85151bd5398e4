"""Expansion schemes: cylinder layout, digit encoding and decoding.

A scheme pairs a weight family with a placement rule.  Rank-1 cylinders pack
[0, 1] left to right in placement order (ascending index order by default,
optionally with a permuted finite prefix), so the left endpoint of index i is
the sum of the weights placed before it.  Deeper cylinders are placed by the
orientation-preserving similarity S_i(t) = a_i + q_i * t, giving

    left(d ++ [j])   = left(d) + length(d) * a_j
    length(d ++ [j]) = length(d) * q_j

Digit strings are plain tuples of nonnegative ints.  The codec works in
ordinary double precision with residual clamping and is deliberately
non-rigorous; the dimension machinery uses directed bounds instead.

Shared endpoints of adjacent cylinders belong to the right cylinder, so every
x in [0, 1) has a unique digit at each rank.  For an infinite alphabet the
left endpoints accumulate at 1, hence x = 1 (and only x = 1, or points whose
residual lands there) has no digit: that is the countable expansion-less set,
reported via DeltaInfinityError.
"""

from __future__ import annotations

import bisect
import json
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DeltaInfinityError, GlsdimError
from .families import GeometricWeights, WeightFamily, make_family

# Hard ceiling on materialized cylinder positions (heavy-tail families can in
# principle demand arbitrarily large digits; beyond this we refuse rather than
# exhaust memory).
_MAX_POSITIONS = 1 << 22


class _LayoutStall(Exception):
    """Cumulative lefts stopped increasing (weights underflowed)."""


@dataclass(frozen=True)
class Placement:
    """Order in which rank-1 cylinders pack the unit interval.

    "ascending" places index i at position i.  "permuted" reorders the first
    len(prefix) indices by the given permutation and is ascending beyond it.
    """

    order: str = "ascending"
    prefix: tuple[int, ...] = ()
    _pos_of: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.order not in ("ascending", "permuted"):
            raise ConfigError(f"placement order must be 'ascending' or 'permuted', got {self.order!r}")
        if self.order == "permuted":
            if sorted(self.prefix) != list(range(len(self.prefix))):
                raise ConfigError("placement prefix must be a permutation of 0..m-1")
            self._pos_of.update({idx: pos for pos, idx in enumerate(self.prefix)})
        elif self.prefix:
            raise ConfigError("ascending placement takes no prefix")

    @staticmethod
    def ascending() -> "Placement":
        return Placement("ascending")

    @staticmethod
    def permuted(prefix) -> "Placement":
        return Placement("permuted", tuple(int(i) for i in prefix))

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    def index_at(self, pos: int) -> int:
        if pos < len(self.prefix):
            return self.prefix[pos]
        return pos

    def position_of(self, index: int) -> int:
        if index < len(self.prefix):
            return self._pos_of[index]
        return index


@dataclass(frozen=True)
class Cylinder:
    """A rank-n interval [left, left + length]."""

    left: float
    length: float

    def __post_init__(self):
        if not (-1e-12 <= self.left and self.length > 0.0):
            raise ValueError(f"bad cylinder left={self.left} length={self.length}")
        if self.left + self.length > 1.0 + 1e-12:
            raise ValueError(f"cylinder exceeds the unit interval: {self}")

    @property
    def right(self) -> float:
        return self.left + self.length

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.left - slack <= x <= self.right + slack


class _Layout:
    """Cumulative left endpoints in placement order, extended on demand.

    Entries never change once written and the list only grows, so readers
    need no lock; extension is serialized.
    """

    def __init__(self, family: WeightFamily, placement: Placement):
        self._family = family
        self._placement = placement
        self._cum: list[float] = [0.0]
        self._widths: list[float] = []
        self._lock = threading.Lock()
        if family.alphabet_size is not None:
            if placement.prefix_len > family.alphabet_size:
                raise ConfigError("placement prefix longer than the family alphabet")
            self._grow_to(family.alphabet_size)

    @property
    def positions(self) -> int:
        return len(self._cum) - 1

    def _weights_for_positions(self, a: int, b: int) -> np.ndarray:
        m = self._placement.prefix_len
        fam = self._family
        if b <= m:
            return np.array([fam.weight(self._placement.prefix[p]) for p in range(a, b)])
        if a < m:
            head = [fam.weight(self._placement.prefix[p]) for p in range(a, m)]
            return np.concatenate([np.array(head), fam.weight_block(m, b)])
        return fam.weight_block(a, b)

    def _grow_to(self, n_positions: int) -> None:
        with self._lock:
            cur = len(self._cum) - 1
            if n_positions <= cur:
                return
            if n_positions > _MAX_POSITIONS:
                raise GlsdimError(
                    f"digit value beyond supported layout size ({_MAX_POSITIONS})")
            w = self._weights_for_positions(cur, n_positions)
            # Seeding cumsum with the previous total keeps the running-sum
            # recurrence c[p+1] = c[p] + q[p] exact at every entry.
            ext = np.cumsum(np.concatenate(([self._cum[-1]], w)))
            self._cum.extend(ext[1:].tolist())
            self._widths.extend(w.tolist())

    def left_at(self, pos: int) -> float:
        m = self._family.alphabet_size
        if m is not None and pos >= m:
            raise IndexError(f"position {pos} outside finite alphabet of size {m}")
        if pos + 1 > len(self._cum) - 1:
            self._grow_to(max(pos + 1, min(2 * (pos + 1), _MAX_POSITIONS)))
        return self._cum[pos]

    def width_at(self, pos: int) -> float:
        self.left_at(pos)
        return self._widths[pos]

    def left_of_index(self, index: int) -> float:
        return self.left_at(self._placement.position_of(index))

    def _cover(self, u: float) -> None:
        while self._cum[-1] <= u:
            cur = len(self._cum) - 1
            if cur >= _MAX_POSITIONS:
                raise GlsdimError(
                    f"digit value beyond supported layout size ({_MAX_POSITIONS})")
            before = self._cum[-1]
            self._grow_to(min(max(2 * cur, 64), _MAX_POSITIONS))
            if self._cum[-1] == before:
                raise _LayoutStall

    def position_for(self, u: float) -> int:
        """Position p with c[p] <= u < c[p+1] under the half-open convention."""
        fam = self._family
        if fam.alphabet_size is not None:
            # Final cylinder of a finite alphabet is closed on the right.
            p = bisect.bisect_right(self._cum, u) - 1
            return min(p, fam.alphabet_size - 1)
        if u >= 1.0:
            raise _LayoutStall
        if isinstance(fam, GeometricWeights):
            m = self._placement.prefix_len
            if m == 0 or u >= self.left_at(m):
                # Beyond any permuted prefix, a_i = 1 - r^i in exact arithmetic;
                # invert, then verify against the cached cumulative sums.
                guess = max(int(math.log1p(-u) / math.log(fam.ratio)), m)
                p = self._verify_near(guess, u)
                if p is not None:
                    return p
                # fall through to the generic search if the guess was far off
        self._cover(u)
        return bisect.bisect_right(self._cum, u) - 1

    def _verify_near(self, guess: int, u: float) -> int | None:
        p = max(guess, 0)
        self.left_at(p + 1)
        for _ in range(4):
            if self._cum[p] <= u:
                break
            if p == 0:
                break
            p -= 1
        for _ in range(4):
            self.left_at(p + 1)
            if u < self._cum[p + 1]:
                break
            p += 1
        self.left_at(p + 1)
        if self._cum[p] <= u < self._cum[p + 1]:
            return p
        return None


class GLSScheme:
    """A weight family plus a placement rule; the full expansion machinery.

    Immutable after construction apart from an internal append-only cache of
    cylinder endpoints; all operations are pure functions of their inputs and
    safe to call concurrently.
    """

    def __init__(self, weights: WeightFamily, placement: Placement | None = None):
        self.weights = weights
        self.placement = placement or Placement.ascending()
        self._layout = _Layout(weights, self.placement)

    @property
    def q_max(self) -> float:
        return self.weights.q_max

    @property
    def delta_infinity_countable(self) -> bool:
        # Left-to-right packing leaves only accumulation points of the left
        # endpoints outside the cylinders; for the supported placements that
        # set is at most countable by construction.
        return True

    def left_of(self, index: int) -> float:
        return self._layout.left_of_index(index)

    def cylinder(self, digits) -> Cylinder:
        digits = tuple(digits)
        if not digits:
            raise ValueError("digit string must be nonempty")
        left, length = 0.0, 1.0
        for d in digits:
            if d < 0:
                raise ValueError(f"digits must be nonnegative, got {d}")
            left += length * self.left_of(d)
            length *= self.weights.weight(d)
        return Cylinder(left, length)

    def decode(self, digits) -> float:
        """Left endpoint of the digit string's cylinder."""
        return self.cylinder(digits).left

    def encode(self, x: float, n: int) -> tuple[int, ...]:
        """First n digits of x, using the half-open endpoint convention.

        Raises DeltaInfinityError (carrying the rank reached) when the
        residual lands at the accumulation point of the left endpoints and so
        lies in no cylinder.
        """
        if not 0.0 <= x <= 1.0:
            raise ValueError(f"x must lie in [0, 1], got {x}")
        if n < 1:
            raise ValueError(f"rank must be at least 1, got {n}")
        digits = []
        u = x
        for rank in range(1, n + 1):
            if self.weights.alphabet_size is None and u >= 1.0:
                raise DeltaInfinityError(rank)
            try:
                p = self._layout.position_for(u)
            except _LayoutStall:
                raise DeltaInfinityError(rank) from None
            i = self.placement.index_at(p)
            digits.append(i)
            u = (u - self._layout.left_at(p)) / self._layout.width_at(p)
            u = min(max(u, 0.0), 1.0)
        return tuple(digits)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                       for c in self.checks],
        }


def validate_scheme(scheme: GLSScheme, cylinders: int = 1000,
                    mass_tol: float = 1e-9) -> ValidationReport:
    """Structural sanity report: total mass, packing, positivity.

    Failures are report entries, never exceptions.
    """
    checks = []
    fam = scheme.weights

    lo, hi = fam.total_mass_bounds()
    mass_ok = lo <= 1.0 + mass_tol and hi >= 1.0 - mass_tol
    checks.append(CheckResult(
        "mass", mass_ok,
        f"total weight in [{lo:.17g}, {hi:.17g}], tolerance {mass_tol:g}"))

    n = cylinders if fam.alphabet_size is None else min(cylinders, fam.alphabet_size)
    layout = scheme._layout
    layout._grow_to(n)
    cum = layout._cum[:n + 1]
    widths = layout._widths[:n]
    positive = all(w > 0.0 for w in widths)
    checks.append(CheckResult(
        "positive_weights", positive,
        f"first {n} weights positive" if positive else "nonpositive weight found"))

    increasing = all(cum[p] < cum[p + 1] for p in range(n))
    packed = all(abs(cum[p + 1] - (cum[p] + widths[p])) <= 1e-12 for p in range(n))
    checks.append(CheckResult(
        "rank1_packing", increasing and packed,
        f"first {n} cylinders pack left-to-right with disjoint interiors"
        if increasing and packed else "cylinder packing violated"))

    in_unit = cum[n] <= 1.0 + 1e-12
    checks.append(CheckResult(
        "unit_interval", in_unit,
        f"rightmost checked endpoint {cum[n]:.17g} within [0, 1]"
        if in_unit else f"cylinders overflow the unit interval ({cum[n]:.17g})"))

    return ValidationReport(tuple(checks))


_TOP_KEYS = {"weights", "placement"}
_WEIGHT_KEYS = {
    "luroth": {"kind"},
    "geometric": {"kind", "ratio"},
    "golden": {"kind"},
    "loglog": {"kind"},
    "explicit": {"kind", "values", "tail_ratio"},
}
_PLACEMENT_KEYS = {"ascending": {"order"}, "permuted": {"order", "prefix"}}


def scheme_from_config(cfg: dict) -> GLSScheme:
    """Build a scheme from the JSON configuration schema; unknown keys are errors."""
    if not isinstance(cfg, dict):
        raise ConfigError("scheme config must be a JSON object")
    unknown = set(cfg) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "weights" not in cfg:
        raise ConfigError("missing required field 'weights'")

    wcfg = cfg["weights"]
    if not isinstance(wcfg, dict) or "kind" not in wcfg:
        raise ConfigError("'weights' must be an object with a 'kind' field")
    kind = wcfg["kind"]
    if kind not in _WEIGHT_KEYS:
        raise ConfigError(f"unknown weights.kind {kind!r}")
    unknown = set(wcfg) - _WEIGHT_KEYS[kind]
    if unknown:
        raise ConfigError(f"unknown keys for weights.kind={kind}: {sorted(unknown)}")
    if kind == "geometric" and not isinstance(wcfg.get("ratio"), (int, float)):
        raise ConfigError("weights.ratio must be a number")
    if kind == "explicit":
        vals = wcfg.get("values")
        if not isinstance(vals, list) or not all(isinstance(v, (int, float)) for v in vals):
            raise ConfigError("weights.values must be a list of numbers")
        tr = wcfg.get("tail_ratio")
        if tr is not None and not isinstance(tr, (int, float)):
            raise ConfigError("weights.tail_ratio must be a number")
    family = make_family(kind, ratio=wcfg.get("ratio"), values=wcfg.get("values"),
                         tail_ratio=wcfg.get("tail_ratio"))

    pcfg = cfg.get("placement", {"order": "ascending"})
    if not isinstance(pcfg, dict) or "order" not in pcfg:
        raise ConfigError("'placement' must be an object with an 'order' field")
    order = pcfg["order"]
    if order not in _PLACEMENT_KEYS:
        raise ConfigError(f"unknown placement.order {order!r}")
    unknown = set(pcfg) - _PLACEMENT_KEYS[order]
    if unknown:
        raise ConfigError(f"unknown keys for placement.order={order}: {sorted(unknown)}")
    if order == "permuted":
        prefix = pcfg.get("prefix")
        if not isinstance(prefix, list) or not all(isinstance(i, int) for i in prefix):
            raise ConfigError("placement.prefix must be a list of ints")
        placement = Placement.permuted(prefix)
    else:
        placement = Placement.ascending()
    return GLSScheme(family, placement)


def load_scheme(path) -> GLSScheme:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from None
    return scheme_from_config(cfg)
