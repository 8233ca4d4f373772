"""Per-leaf sufficient statistics and split-merit computation.

A leaf keeps class counts, one contingency table per nominal attribute and
one per-class Gaussian summary (Welford mean/M2) per numeric attribute.
Split merit is information gain; numeric attributes are scored over k
equally spaced candidate thresholds between the observed min and max, with
child distributions estimated from per-class Gaussian tail mass.
"""

from __future__ import annotations

import math

_LN2 = math.log(2.0)
_SQRT2 = math.sqrt(2.0)

#: Lower bound for standard deviations so constant attributes stay finite.
MIN_STD = 1e-9


def entropy(counts) -> float:
    """Shannon entropy in bits of a count distribution (0*log0 = 0)."""
    total = 0.0
    acc = 0.0
    for c in counts:
        if c < 0:
            raise ValueError(f"negative count {c}")
        if c > 0:
            total += c
            acc += c * math.log(c)
    if total <= 0:
        raise ValueError("entropy of an all-zero distribution")
    return (math.log(total) - acc / total) / _LN2


def info_gain(parent_counts, child_distributions) -> float:
    """H(parent) minus the weighted child entropies, clamped at 0.

    Children are expected to partition the parent mass; counts may be real
    (Gaussian mass estimates), empty children are skipped.
    """
    n = sum(parent_counts)
    if n <= 0:
        raise ValueError("info_gain of an empty parent")
    remainder = 0.0
    for child in child_distributions:
        cn = sum(child)
        if cn > 0:
            remainder += (cn / n) * entropy(child)
    return max(entropy(parent_counts) - remainder, 0.0)


class SplitCandidate:
    """A scored way to split a leaf on one attribute."""

    __slots__ = ("attribute", "kind", "threshold", "merit", "children")

    def __init__(self, attribute, kind, threshold, merit, children):
        self.attribute = attribute
        self.kind = kind  # "nominal" (multiway) or "numeric" (binary <=/>)
        self.threshold = threshold
        self.merit = merit
        self.children = children  # per-child class distributions

    def __repr__(self):
        t = f", t={self.threshold:.6g}" if self.threshold is not None else ""
        return f"SplitCandidate(attr={self.attribute}, {self.kind}{t}, G={self.merit:.6g})"


class NominalObserver:
    """Value-by-class contingency table for one nominal attribute."""

    __slots__ = ("arity", "n_classes", "table", "total")

    def __init__(self, arity: int, n_classes: int):
        self.arity = arity
        self.n_classes = n_classes
        self.table = [[0] * n_classes for _ in range(arity)]
        self.total = 0

    def observe(self, value: int, cls: int) -> None:
        self.table[value][cls] += 1
        self.total += 1

    def candidate(self, attribute: int, parent_counts) -> SplitCandidate | None:
        """Multiway split candidate, one child per attribute value."""
        if self.total == 0:
            return None
        children = [list(row) for row in self.table]
        merit = info_gain(parent_counts, children)
        return SplitCandidate(attribute, "nominal", None, merit, children)


def _phi(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / _SQRT2))


class GaussianObserver:
    """Per-class running Gaussian summary for one numeric attribute."""

    __slots__ = ("n_classes", "counts", "means", "m2s", "vmin", "vmax")

    def __init__(self, n_classes: int):
        self.n_classes = n_classes
        self.counts = [0] * n_classes
        self.means = [0.0] * n_classes
        self.m2s = [0.0] * n_classes
        self.vmin = math.inf
        self.vmax = -math.inf

    def observe(self, value: float, cls: int) -> None:
        n = self.counts[cls] + 1
        self.counts[cls] = n
        mean = self.means[cls]
        d = value - mean
        mean += d / n
        self.means[cls] = mean
        self.m2s[cls] += d * (value - mean)
        if value < self.vmin:
            self.vmin = value
        if value > self.vmax:
            self.vmax = value

    @property
    def total(self) -> int:
        return sum(self.counts)

    def variance(self, cls: int) -> float:
        n = self.counts[cls]
        return self.m2s[cls] / (n - 1) if n >= 2 else 0.0

    def std(self, cls: int) -> float:
        return max(math.sqrt(self.variance(cls)), MIN_STD)


def numeric_candidates(observer: GaussianObserver, k_thresholds: int,
                       attribute: int = 0) -> list[SplitCandidate]:
    """Binary split candidates at k equally spaced thresholds in (min, max).

    Child class distributions come from Gaussian tail mass: the below-child
    gets count * Phi((t - mean) / std) per class, the above-child the exact
    complement.  Degenerate observers (fewer than 2 values, or min == max)
    yield no candidates.
    """
    lo, hi = observer.vmin, observer.vmax
    if observer.total < 2 or not lo < hi:
        return []
    counts = observer.counts
    means = observer.means
    active = [c for c in range(observer.n_classes) if counts[c] > 0]
    stds = {c: observer.std(c) for c in active}
    parent = [float(counts[c]) for c in range(observer.n_classes)]
    step = (hi - lo) / (k_thresholds + 1)
    out = []
    for j in range(1, k_thresholds + 1):
        t = lo + step * j
        below = [0.0] * observer.n_classes
        above = [0.0] * observer.n_classes
        for c in active:
            mass = counts[c] * _phi((t - means[c]) / stds[c])
            below[c] = mass
            above[c] = counts[c] - mass
        merit = info_gain(parent, (below, above))
        out.append(SplitCandidate(attribute, "numeric", t, merit, [below, above]))
    return out


class LeafStats:
    """All sufficient statistics kept at one leaf."""

    __slots__ = ("schema", "class_counts", "n_seen", "classes_seen",
                 "_nominal", "_numeric")

    def __init__(self, schema):
        self.schema = schema
        c = schema.num_classes
        self.class_counts = [0] * c
        self.n_seen = 0
        self.classes_seen = 0
        self._nominal = []  # (attribute index, NominalObserver)
        self._numeric = []  # (attribute index, GaussianObserver)
        for i, attr in enumerate(schema.attributes):
            if attr.is_nominal:
                self._nominal.append((i, NominalObserver(attr.arity, c)))
            else:
                self._numeric.append((i, GaussianObserver(c)))

    def observe(self, instance) -> None:
        """Fold one conforming instance into every observer."""
        label = instance.label
        values = instance.values
        if self.class_counts[label] == 0:
            self.classes_seen += 1
        self.class_counts[label] += 1
        self.n_seen += 1
        for i, obs in self._nominal:
            obs.observe(values[i], label)
        for i, obs in self._numeric:
            obs.observe(values[i], label)

    def observer(self, attribute: int):
        for i, obs in self._nominal:
            if i == attribute:
                return obs
        for i, obs in self._numeric:
            if i == attribute:
                return obs
        raise IndexError(f"no observer for attribute {attribute}")

    def attribute_candidate(self, attribute: int, k_thresholds: int) -> SplitCandidate | None:
        """Best candidate for one attribute, or None if it has nothing to offer."""
        obs = self.observer(attribute)
        if isinstance(obs, NominalObserver):
            return obs.candidate(attribute, self.class_counts)
        best = None
        for cand in numeric_candidates(obs, k_thresholds, attribute):
            if best is None or cand.merit > best.merit:
                best = cand
        return best


def best_two(stats: LeafStats, enabled_attributes, k_thresholds: int):
    """Highest- and second-highest-merit candidates over distinct attributes.

    Ties break toward the lower attribute index; the second slot is None
    when fewer than two enabled attributes produced a candidate.
    """
    enabled = sorted(enabled_attributes)
    if not enabled:
        raise ValueError("no enabled attributes")
    best = second = None
    for a in enabled:
        cand = stats.attribute_candidate(a, k_thresholds)
        if cand is None:
            continue
        if best is None or cand.merit > best.merit:
            best, second = cand, best
        elif second is None or cand.merit > second.merit:
            second = cand
    return best, second
