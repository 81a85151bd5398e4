"""Random points with i.i.d. expansion digits, and empirical dimension checks.

A digit law p = (p_0, p_1, ...) together with a scheme defines the random
number whose digits are drawn independently from p.  Its distribution is
supported on the closure of the digit-restricted set for V = {i : p_i > 0},
so the spectrum dimension reduces to the dimension machinery.

Sampling draws each digit by inverse CDF over the enumerated support, with
cumulative sums cached up to mass 1 - 1e-12 (or a hard entry cap for heavy
tails); the remaining mass is folded into the last cached digit and the fold
size is reported in the sample metadata.  Points are the left endpoints of
the sampled rank-n cylinders.

The RNG is numpy's counter-based Philox keyed by the seed: runs with equal
(scheme, p, n, count, seed) produce bit-identical points, and point j is a
fixed function of the seed and j (row j of the uniform block), so generation
order cannot change results.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .dimension import DimensionResult, dim_hausdorff
from .errors import ConfigError, DegenerateFitError, UnsupportedSchemeError
from .families import WeightFamily
from .scheme import GLSScheme
from .support import SupportSet

#: Per-digit mass left out of the cached inverse-CDF table when reachable.
TRUNCATION_MASS = 1e-12

#: Hard cap on cached table entries; heavy-tailed laws (plain tails ~ 1/k)
#: cannot reach TRUNCATION_MASS and stop here, with the fold mass reported.
MAX_TABLE_ENTRIES = 1 << 20


class DigitDistribution:
    """An i.i.d. digit law: explicit probabilities or family-proportional.

    Explicit: probabilities over listed indices, summing to 1 within 1e-12.
    Proportional: p_i = q_i / W over a support set V, W the q-mass of V.
    """

    def __init__(self, kind: str, indices=None, probs=None,
                 family: WeightFamily | None = None,
                 restricted_to: SupportSet | None = None):
        self.kind = kind
        if kind == "explicit":
            idx = np.asarray(list(indices), dtype=np.int64)
            pr = np.asarray(list(probs), dtype=np.float64)
            if idx.size != pr.size or idx.size == 0:
                raise ValueError("indices and probs must be equal-length and nonempty")
            if np.any(idx < 0) or idx.size != np.unique(idx).size:
                raise ValueError("digit indices must be nonnegative and distinct")
            if np.any(pr < 0.0) or abs(float(pr.sum()) - 1.0) > 1e-12:
                raise ValueError(f"probabilities must be nonnegative and sum to 1, got {pr.sum()!r}")
            order = np.argsort(idx)
            self.indices = idx[order]
            self.probs = pr[order]
            self.family = None
            self.restricted_to = None
        elif kind == "proportional":
            if family is None or restricted_to is None:
                raise ValueError("proportional law needs a family and a support set")
            self.family = family
            self.restricted_to = restricted_to
            self.indices = None
            self.probs = None
            self._weight_of_support = self._support_mass()
        else:
            raise ValueError(f"unknown digit-distribution kind {kind!r}")

    @staticmethod
    def explicit(pairs) -> "DigitDistribution":
        """From {index: probability} or an iterable of (index, probability)."""
        items = sorted(pairs.items() if isinstance(pairs, dict) else pairs)
        return DigitDistribution("explicit",
                                 indices=[i for i, _ in items],
                                 probs=[p for _, p in items])

    @staticmethod
    def proportional(family: WeightFamily, support: SupportSet) -> "DigitDistribution":
        return DigitDistribution("proportional", family=family, restricted_to=support)

    @staticmethod
    def from_spec(spec: str, family: WeightFamily | None = None) -> "DigitDistribution":
        """Parse "0:0.5,2:0.5" or "proportional:<support spec>"."""
        spec = spec.strip()
        if spec.startswith("proportional:"):
            if family is None:
                raise ConfigError("proportional digit law needs a scheme")
            return DigitDistribution.proportional(
                family, SupportSet.from_spec(spec[len("proportional:"):]))
        try:
            pairs = []
            for part in spec.split(","):
                i, _, p = part.partition(":")
                pairs.append((int(i), float(p)))
        except ValueError as exc:
            raise ConfigError(f"bad digit-law spec {spec!r}: {exc}") from None
        try:
            return DigitDistribution.explicit(pairs)
        except ValueError as exc:
            raise ConfigError(f"bad digit-law spec {spec!r}: {exc}") from None

    def _support_mass(self) -> float:
        fam, v = self.family, self.restricted_to
        if v.kind == "all":
            return 1.0
        if v.kind == "cofinite":
            return 1.0 - sum(fam.weight(e) for e in v.indices
                             if fam.alphabet_size is None or e < fam.alphabet_size)
        return sum(fam.weight(i) for i in v.indices
                   if fam.alphabet_size is None or i < fam.alphabet_size)

    def mass(self, i: int) -> float:
        if self.kind == "explicit":
            pos = np.searchsorted(self.indices, i)
            if pos < self.indices.size and self.indices[pos] == i:
                return float(self.probs[pos])
            return 0.0
        if not self.restricted_to.contains(i):
            return 0.0
        if self.family.alphabet_size is not None and i >= self.family.alphabet_size:
            return 0.0
        return self.family.weight(i) / self._weight_of_support

    def support(self) -> SupportSet:
        if self.kind == "explicit":
            return SupportSet.finite(int(i) for i, p in zip(self.indices, self.probs) if p > 0.0)
        return self.restricted_to

    def cumulative_table(self) -> tuple[np.ndarray, np.ndarray, float]:
        """(support indices, cumulative probabilities, folded tail mass).

        The last cumulative entry is set to exactly 1.0, folding the residual
        mass into the last cached digit.
        """
        if self.kind == "explicit":
            keep = self.probs > 0.0
            idx = self.indices[keep]
            cum = np.cumsum(self.probs[keep])
            fold = max(0.0, 1.0 - float(cum[-1]))
            cum[-1] = 1.0
            return idx, cum, fold

        fam, v = self.family, self.restricted_to
        w_support = self._weight_of_support
        if v.kind == "finite":
            members = [i for i in v.indices
                       if fam.alphabet_size is None or i < fam.alphabet_size]
            idx = np.asarray(members, dtype=np.int64)
            cum = np.cumsum(np.array([fam.weight(i) for i in members]) / w_support)
            fold = max(0.0, 1.0 - float(cum[-1]))
            cum[-1] = 1.0
            return idx, cum, fold

        target = 1.0 - TRUNCATION_MASS
        idx_parts: list[np.ndarray] = []
        pr_parts: list[np.ndarray] = []
        total = 0.0
        entries = 0
        a, block = 0, 4096
        bound = fam.alphabet_size
        while total < target and entries < MAX_TABLE_ENTRIES and (bound is None or a < bound):
            b = a + block if bound is None else min(a + block, bound)
            w = fam.weight_block(a, b)
            ids = np.arange(a, b, dtype=np.int64)
            if v.kind == "cofinite":
                keep = np.ones(b - a, dtype=bool)
                for e in v.indices:
                    if a <= e < b:
                        keep[e - a] = False
                w, ids = w[keep], ids[keep]
            p = w / w_support
            idx_parts.append(ids)
            pr_parts.append(p)
            total += float(p.sum())
            entries += ids.size
            a = b
            block = min(2 * block, 1 << 18)
        idx = np.concatenate(idx_parts)
        cum = np.cumsum(np.concatenate(pr_parts))
        stop = min(int(np.searchsorted(cum, target)) + 1, MAX_TABLE_ENTRIES)
        idx, cum = idx[:stop], cum[:stop]
        fold = max(0.0, 1.0 - float(cum[-1]))
        cum[-1] = 1.0
        return idx, cum, fold


@dataclass(frozen=True)
class SpectrumSample:
    """Sampled points of the random number, all rank-n cylinder left endpoints."""

    points: np.ndarray
    digits_per_point: int
    seed: int
    metadata: dict


RNG_NAME = "numpy-philox"


def _digit_lookup(scheme: GLSScheme, indices: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    top = int(indices.max())
    a = np.zeros(top + 1)
    q = np.ones(top + 1)
    for i in indices.tolist():
        a[i] = scheme.left_of(i)
        q[i] = scheme.weights.weight(i)
    return a, q


def sample_point(scheme: GLSScheme, p: DigitDistribution, n: int,
                 rng: np.random.Generator) -> float:
    """One draw: n i.i.d. digits by inverse CDF, decoded to a point."""
    if n < 1:
        raise ValueError("rank must be at least 1")
    idx, cum, _ = p.cumulative_table()
    u = rng.random(n)
    digits = [int(idx[bisect.bisect_right(cum, ui)]) for ui in u]
    return scheme.decode(digits)


def sample_points(scheme: GLSScheme, p: DigitDistribution, n: int,
                  count: int, seed: int) -> SpectrumSample:
    """Vectorized sampling of ``count`` points at rank n, reproducible by seed.

    Point j is computed from row j of the Philox uniform block, so results do
    not depend on evaluation order and are bit-identical across runs.
    """
    if n < 1 or count < 1:
        raise ValueError("rank and count must be at least 1")
    idx, cum, fold = p.cumulative_table()
    rng = np.random.Generator(np.random.Philox(key=int(seed)))
    u = rng.random((count, n))
    digits = idx[np.searchsorted(cum, u, side="right")]
    a_arr, q_arr = _digit_lookup(scheme, idx)
    left = np.zeros(count)
    length = np.ones(count)
    # Same fold order as scalar decode, vectorized across points.
    for k in range(n):
        dk = digits[:, k]
        left = left + length * a_arr[dk]
        length = length * q_arr[dk]
    meta = {"rng": RNG_NAME, "seed": int(seed), "fold_mass": fold}
    return SpectrumSample(points=left, digits_per_point=n, seed=int(seed), metadata=meta)


def spectrum_dimension(scheme: GLSScheme, p: DigitDistribution,
                       tol: float | None = None) -> DimensionResult:
    """Dimension of the support of the sampled distribution.

    The support is the closure of the digit-restricted set for supp(p); the
    closure adds at most countably many points, so the dimension is the
    digit-restricted set's dimension.
    """
    if not scheme.delta_infinity_countable:
        raise UnsupportedSchemeError(
            "scheme does not certify a countable expansion-less set")
    return dim_hausdorff(scheme.weights, p.support(), tol)


@dataclass(frozen=True)
class BoxCountResult:
    """Occupied-box counts over a scale ladder and the log-log fit."""

    scales: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    r2: float

    def to_dict(self) -> dict:
        return {"slope": self.slope, "r2": self.r2, "scales": list(self.scales)}


def box_count(points, scales, resolution_floor: float | None = None) -> BoxCountResult:
    """Count occupied bins floor(x/eps) per scale and fit slope of log N
    against log(1/eps) by ordinary least squares over the whole ladder.

    ``resolution_floor`` (usually q_max^n of the sample) rejects ladders finer
    than the sample resolves.  Raises DegenerateFitError when all points share
    one bin at the coarsest scale.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise ValueError("points must be nonempty")
    if np.any(pts < -1e-12) or np.any(pts > 1.0 + 1e-12):
        raise ValueError("points must lie in [0, 1]")
    eps = [float(e) for e in scales]
    if len(eps) < 2:
        raise ValueError("need at least two scales to fit a slope")
    if any(not 0.0 < e <= 1.0 for e in eps):
        raise ValueError("scales must lie in (0, 1]")
    if any(a <= b for a, b in zip(eps, eps[1:])):
        raise ValueError("scales must be strictly decreasing")
    if resolution_floor is not None and eps[-1] < resolution_floor:
        raise ValueError(
            f"finest scale {eps[-1]:g} is below the sample resolution floor "
            f"{resolution_floor:g}; reduce the ladder or raise the sampling rank")
    counts = []
    for e in eps:
        nbins = int(math.ceil(1.0 / e))
        bins = np.minimum(np.floor(pts / e).astype(np.int64), nbins - 1)
        counts.append(int(np.unique(bins).size))
    if counts[0] == 1:
        raise DegenerateFitError(
            f"all points fall into one box at the coarsest scale {eps[0]:g}")
    x = -np.log(np.array(eps))
    y = np.log(np.array(counts, dtype=np.float64))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float((resid ** 2).sum()) / ss_tot
    return BoxCountResult(tuple(eps), tuple(counts), float(slope), r2)


def empirical_cdf(points, grid_size: int) -> list[tuple[float, float]]:
    """Empirical distribution function on a uniform grid over [0, 1]."""
    pts = np.sort(np.asarray(points, dtype=np.float64))
    if pts.size == 0:
        raise ValueError("points must be nonempty")
    if grid_size < 2:
        raise ValueError("grid size must be at least 2")
    xs = np.linspace(0.0, 1.0, grid_size)
    fs = np.searchsorted(pts, xs, side="right") / pts.size
    return list(zip(xs.tolist(), fs.tolist()))


def write_sample_csv(fh, sample: SpectrumSample) -> None:
    fh.write("index,x\n")
    for j, x in enumerate(sample.points.tolist()):
        fh.write(f"{j},{x:.17g}\n")


def write_boxcount_csv(fh, result: BoxCountResult) -> None:
    fh.write("epsilon,count\n")
    for e, c in zip(result.scales, result.counts):
        fh.write(f"{e:.17g},{c}\n")


def write_cdf_csv(fh, pairs) -> None:
    fh.write("x,F\n")
    for x, f in pairs:
        fh.write(f"{x:.17g},{f:.17g}\n")


def read_points_csv(fh) -> np.ndarray:
    header = fh.readline().strip()
    if header != "index,x":
        raise ConfigError(f"expected sample CSV header 'index,x', got {header!r}")
    xs = []
    for line in fh:
        line = line.strip()
        if not line:
            continue
        try:
            _, x = line.split(",")
            xs.append(float(x))
        except ValueError:
            raise ConfigError(f"bad sample CSV row {line!r}") from None
    if not xs:
        raise ConfigError("sample CSV contains no points")
    return np.array(xs)
