"""Incremental Hoeffding-tree classifier.

Instances stream in one at a time: each is routed to a leaf, folded into the
leaf's sufficient statistics, and once the leaf has seen its per-leaf nmin
threshold of instances (and at least two classes) a split check runs.  The
check splits when the information-gain gap between the two best attributes
beats the Hoeffding bound, or when the bound has shrunk below the tie
threshold tau.  After a failed check the leaf's nmin either advances by the
configured step (baseline mode) or jumps to the closed-form instance count
that makes the next check decisive (adaptive mode):

* scenario 1 (gap above tau): the count where the bound falls to the gap,
  ceil(R^2 ln(1/delta) / (2 gap^2));
* scenario 2 (gap at or below tau): the count where the bound falls to tau,
  ceil(R^2 ln(1/delta) / (2 tau^2)).

Failed checks also disable attributes whose merit trails the best by more
than the bound; disabled attributes stay disabled for the life of the leaf.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .schema import Instance, InstanceError, Schema, SchemaMismatchError, \
    parse_schema, schema_to_header
from .stats import GaussianObserver, LeafStats, NominalObserver, SplitCandidate


class TreeFormatError(ValueError):
    """Malformed serialized tree."""


def hoeffding_bound(r: float, delta: float, n: int) -> float:
    """Confidence radius sqrt(R^2 ln(1/delta) / 2n); decreasing in n."""
    if not r > 0:
        raise ValueError(f"range R must be positive, got {r}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must be in (0, 1), got {delta}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return math.sqrt(r * r * math.log(1.0 / delta) / (2.0 * n))


def adapt_nmin(r: float, delta: float, tau: float, delta_g: float, n_l: int):
    """Per-leaf nmin after a failed split check.

    Returns (new_nmin, scenario).  Scenario 2 targets the count where the
    bound reaches tau, scenario 1 the count where it reaches the observed
    merit gap.  The result always exceeds n_l so the leaf makes progress.
    """
    if delta_g <= tau:
        gap, scenario = tau, 2
    else:
        gap, scenario = delta_g, 1
    target = math.ceil(r * r * math.log(1.0 / delta) / (2.0 * gap * gap))
    return max(int(target), n_l + 1), scenario


@dataclass(frozen=True)
class HoeffdingParams:
    """Learner hyperparameters; the merit range R = log2(classes) is derived."""

    delta: float = 1e-6
    tau: float = 0.05
    nmin_initial: int = 200
    adaptation: bool = True
    thresholds_k: int = 10
    splitting_enabled: bool = True

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must be in (0, 1), got {self.delta}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if self.nmin_initial < 1:
            raise ValueError(f"nmin_initial must be >= 1, got {self.nmin_initial}")
        if self.thresholds_k < 1:
            raise ValueError(f"thresholds_k must be >= 1, got {self.thresholds_k}")


class LeafNode:
    __slots__ = ("stats", "nmin_threshold", "enabled", "leaf_id")

    def __init__(self, stats: LeafStats, nmin_threshold: int, enabled, leaf_id: int):
        self.stats = stats
        self.nmin_threshold = nmin_threshold
        self.enabled = tuple(sorted(enabled))
        self.leaf_id = leaf_id


class InternalNode:
    __slots__ = ("attribute", "kind", "threshold", "children", "class_counts")

    def __init__(self, attribute, kind, threshold, children, class_counts):
        self.attribute = attribute
        self.kind = kind
        self.threshold = threshold
        self.children = children
        self.class_counts = class_counts  # frozen at split time, predict fallback


UPDATED = "updated"
CHECKED = "checked"
SPLIT = "split"


class TrainEvent:
    """What one training step did, for instrumentation."""

    __slots__ = ("kind", "path_len", "leaf_id", "n_l", "evaluated", "delta_g",
                 "epsilon", "old_nmin", "new_nmin", "scenario", "attribute",
                 "split_kind", "threshold")

    def __init__(self, kind, path_len, leaf_id=None, n_l=None, evaluated=0,
                 delta_g=None, epsilon=None, old_nmin=None, new_nmin=None,
                 scenario=None, attribute=None, split_kind=None, threshold=None):
        self.kind = kind
        self.path_len = path_len
        self.leaf_id = leaf_id
        self.n_l = n_l
        self.evaluated = evaluated
        self.delta_g = delta_g
        self.epsilon = epsilon
        self.old_nmin = old_nmin
        self.new_nmin = new_nmin
        self.scenario = scenario
        self.attribute = attribute
        self.split_kind = split_kind
        self.threshold = threshold

    def __repr__(self):
        return f"TrainEvent({self.kind}, path={self.path_len})"


class HoeffdingTree:
    """The incremental model: a schema-bound decision tree grown one instance
    at a time.  Single-owner state machine; training and prediction must not
    run concurrently on the same tree.
    """

    def __init__(self, schema: Schema, params: HoeffdingParams | None = None):
        self.schema = schema
        self.params = params or HoeffdingParams()
        self.r = math.log2(schema.num_classes)
        self.global_class_counts = [0] * schema.num_classes
        self.splits_performed = 0
        self.leaf_count = 1
        self.depth = 0
        self._next_leaf_id = 1
        self._arities = tuple(a.arity for a in schema.attributes)
        self._updated_cache: dict[int, TrainEvent] = {}
        self.root = LeafNode(
            LeafStats(schema),
            self.params.nmin_initial,
            range(schema.num_attributes),
            0,
        )

    # -- routing ----------------------------------------------------------

    def _validate(self, values, label=None):
        if len(values) != len(self._arities):
            raise InstanceError(
                f"expected {len(self._arities)} values, got {len(values)}")
        try:
            for v, ar in zip(values, self._arities):
                if ar is None:
                    if not math.isfinite(v):
                        raise InstanceError(f"numeric value {v!r} not finite")
                elif v.__class__ is not int or not 0 <= v < ar:
                    raise InstanceError(f"nominal index {v!r} not in [0, {ar})")
        except TypeError:
            raise InstanceError(f"value of wrong type in {values!r}") from None
        if label is not None and not 0 <= label < self.schema.num_classes:
            raise InstanceError(f"class index {label!r} out of range")

    def _descend(self, values):
        node = self.root
        parent = None
        slot = 0
        path_len = 0
        while node.__class__ is InternalNode:
            if node.kind == "nominal":
                idx = values[node.attribute]
            else:
                idx = 0 if values[node.attribute] <= node.threshold else 1
            parent = node
            slot = idx
            node = node.children[idx]
            path_len += 1
        return node, path_len, parent, slot

    def route_to_leaf(self, instance: Instance):
        """Route a conforming instance; returns (leaf, path_length)."""
        self._validate(instance.values)
        leaf, path_len, _, _ = self._descend(instance.values)
        return leaf, path_len

    # -- training ---------------------------------------------------------

    def train_on_instance(self, instance: Instance) -> TrainEvent:
        self._validate(instance.values, instance.label)
        leaf, path_len, parent, slot = self._descend(instance.values)
        stats = leaf.stats
        stats.observe(instance)
        self.global_class_counts[instance.label] += 1
        if (stats.n_seen >= leaf.nmin_threshold and stats.classes_seen >= 2
                and leaf.enabled):
            return self.attempt_split(leaf, parent, slot, path_len)
        ev = self._updated_cache.get(path_len)
        if ev is None:
            ev = TrainEvent(UPDATED, path_len)
            self._updated_cache[path_len] = ev
        return ev

    def attempt_split(self, leaf: LeafNode, parent: InternalNode | None = None,
                      slot: int = 0, path_len: int = 0) -> TrainEvent:
        """Run one split check at a leaf and apply its outcome.

        With parent omitted the leaf is assumed to be the root.  Returns the
        CHECKED or SPLIT event describing what happened.
        """
        p = self.params
        stats = leaf.stats
        n_l = stats.n_seen
        merits = {}
        best = second = None
        for a in leaf.enabled:
            cand = stats.attribute_candidate(a, p.thresholds_k)
            merits[a] = cand.merit if cand is not None else 0.0
            if cand is None:
                continue
            if best is None or cand.merit > best.merit:
                best, second = cand, best
            elif second is None or cand.merit > second.merit:
                second = cand
        epsilon = hoeffding_bound(self.r, p.delta, n_l)
        if best is None:
            delta_g = 0.0
        elif second is None:
            delta_g = best.merit
        else:
            delta_g = best.merit - second.merit

        if (p.splitting_enabled and best is not None
                and (delta_g > epsilon or epsilon < p.tau)):
            self._apply_split(leaf, parent, slot, path_len, best)
            return TrainEvent(
                SPLIT, path_len, leaf_id=leaf.leaf_id, n_l=n_l,
                evaluated=len(leaf.enabled), delta_g=delta_g, epsilon=epsilon,
                attribute=best.attribute, split_kind=best.kind,
                threshold=best.threshold)

        if best is not None:
            keep = tuple(a for a in leaf.enabled
                         if a == best.attribute or best.merit - merits[a] <= epsilon)
            leaf.enabled = keep
        old_nmin = leaf.nmin_threshold
        if p.adaptation:
            new_nmin, scenario = adapt_nmin(self.r, p.delta, p.tau, delta_g, n_l)
        else:
            new_nmin, scenario = n_l + p.nmin_initial, None
        leaf.nmin_threshold = new_nmin
        return TrainEvent(
            CHECKED, path_len, leaf_id=leaf.leaf_id, n_l=n_l,
            evaluated=len(merits), delta_g=delta_g, epsilon=epsilon,
            old_nmin=old_nmin, new_nmin=new_nmin, scenario=scenario)

    def _apply_split(self, leaf, parent, slot, path_len, cand: SplitCandidate):
        attr = cand.attribute
        if cand.kind == "nominal":
            fanout = self.schema.attributes[attr].arity
            child_enabled = tuple(a for a in leaf.enabled if a != attr)
        else:
            fanout = 2
            child_enabled = leaf.enabled
        children = []
        for _ in range(fanout):
            children.append(LeafNode(
                LeafStats(self.schema), self.params.nmin_initial,
                child_enabled, self._next_leaf_id))
            self._next_leaf_id += 1
        node = InternalNode(attr, cand.kind, cand.threshold, children,
                            list(leaf.stats.class_counts))
        if parent is None:
            self.root = node
        else:
            parent.children[slot] = node
        self.splits_performed += 1
        self.leaf_count += fanout - 1
        if path_len + 1 > self.depth:
            self.depth = path_len + 1

    # -- prediction -------------------------------------------------------

    def predict_instance(self, instance: Instance) -> int:
        """Majority class of the routed leaf; empty leaves fall back to the
        nearest ancestor distribution, then the global prior, then class 0."""
        self._validate(instance.values)
        values = instance.values
        node = self.root
        fallback = None
        while node.__class__ is InternalNode:
            if any(node.class_counts):
                fallback = node.class_counts
            if node.kind == "nominal":
                node = node.children[values[node.attribute]]
            else:
                node = node.children[0 if values[node.attribute] <= node.threshold else 1]
        counts = node.stats.class_counts
        if not any(counts):
            if fallback is not None:
                counts = fallback
            elif any(self.global_class_counts):
                counts = self.global_class_counts
        return max(range(len(counts)), key=counts.__getitem__)

    def iter_leaves(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.__class__ is InternalNode:
                stack.extend(reversed(node.children))
            else:
                yield node

    # -- serialization ----------------------------------------------------

    def serialize(self) -> str:
        """Canonical text form: depth-first JSON with fixed field order and
        full-precision numerics; byte-equal for byte-equal training histories.
        """
        p = self.params
        doc = {
            "format": "vfdt-tree-1",
            "schema": schema_to_header(self.schema),
            "params": {
                "delta": p.delta, "tau": p.tau, "nmin_initial": p.nmin_initial,
                "adaptation": p.adaptation, "thresholds_k": p.thresholds_k,
                "splitting_enabled": p.splitting_enabled,
            },
            "global_class_counts": self.global_class_counts,
            "splits_performed": self.splits_performed,
            "depth": self.depth,
            "next_leaf_id": self._next_leaf_id,
            "root": self._node_to_doc(self.root),
        }
        return json.dumps(doc, separators=(",", ":"))

    def _node_to_doc(self, node):
        if node.__class__ is InternalNode:
            return {
                "type": "internal",
                "attribute": node.attribute,
                "kind": node.kind,
                "threshold": node.threshold,
                "class_counts": node.class_counts,
                "children": [self._node_to_doc(ch) for ch in node.children],
            }
        stats = node.stats
        observers = []
        for attr_index in range(self.schema.num_attributes):
            obs = stats.observer(attr_index)
            if isinstance(obs, NominalObserver):
                observers.append({"table": obs.table})
            else:
                observers.append({
                    "counts": obs.counts,
                    "means": obs.means,
                    "m2": obs.m2s,
                    "min": None if math.isinf(obs.vmin) else obs.vmin,
                    "max": None if math.isinf(obs.vmax) else obs.vmax,
                })
        return {
            "type": "leaf",
            "leaf_id": node.leaf_id,
            "nmin_threshold": node.nmin_threshold,
            "enabled": list(node.enabled),
            "n_seen": stats.n_seen,
            "class_counts": stats.class_counts,
            "observers": observers,
        }

    @classmethod
    def deserialize(cls, text: str, schema: Schema | None = None) -> "HoeffdingTree":
        """Rebuild a tree from serialize() output.

        When a schema is supplied it must match the one embedded in the text.
        """
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TreeFormatError(f"not valid tree JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != "vfdt-tree-1":
            raise TreeFormatError("missing or unknown tree format tag")
        try:
            embedded = parse_schema(doc["schema"])
            if schema is not None and embedded != schema:
                raise SchemaMismatchError(
                    f"tree schema {doc['schema']!r} does not match expected "
                    f"{schema_to_header(schema)!r}")
            params = HoeffdingParams(**doc["params"])
            tree = cls(embedded, params)
            tree.global_class_counts = [int(x) for x in doc["global_class_counts"]]
            tree.splits_performed = int(doc["splits_performed"])
            tree.depth = int(doc["depth"])
            tree._next_leaf_id = int(doc["next_leaf_id"])
            tree.root = tree._node_from_doc(doc["root"])
        except SchemaMismatchError:
            raise
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise TreeFormatError(f"malformed tree document: {exc}") from None
        tree.leaf_count = sum(1 for _ in tree.iter_leaves())
        return tree

    def _node_from_doc(self, doc):
        if doc["type"] == "internal":
            children = [self._node_from_doc(ch) for ch in doc["children"]]
            return InternalNode(int(doc["attribute"]), doc["kind"],
                                doc["threshold"],
                                children, [int(x) for x in doc["class_counts"]])
        if doc["type"] != "leaf":
            raise TreeFormatError(f"unknown node type {doc['type']!r}")
        stats = LeafStats(self.schema)
        stats.class_counts = [int(x) for x in doc["class_counts"]]
        stats.n_seen = int(doc["n_seen"])
        stats.classes_seen = sum(1 for x in stats.class_counts if x > 0)
        observers = doc["observers"]
        if len(observers) != self.schema.num_attributes:
            raise TreeFormatError("observer count does not match schema")
        for i, attr in enumerate(self.schema.attributes):
            obs = stats.observer(i)
            od = observers[i]
            if attr.is_nominal:
                table = [[int(x) for x in row] for row in od["table"]]
                if len(table) != attr.arity or any(len(r) != self.schema.num_classes for r in table):
                    raise TreeFormatError(f"bad contingency table for attribute {i}")
                obs.table = table
                obs.total = sum(sum(r) for r in table)
            else:
                obs.counts = [int(x) for x in od["counts"]]
                obs.means = [float(x) for x in od["means"]]
                obs.m2s = [float(x) for x in od["m2"]]
                obs.vmin = math.inf if od["min"] is None else float(od["min"])
                obs.vmax = -math.inf if od["max"] is None else float(od["max"])
        leaf = LeafNode(stats, int(doc["nmin_threshold"]),
                        [int(a) for a in doc["enabled"]], int(doc["leaf_id"]))
        return leaf
