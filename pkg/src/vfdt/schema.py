"""Attribute schemas and labelled instances.

A schema declares an ordered list of attributes (nominal with a fixed arity,
or numeric) plus the class labels.  Instances store nominal values as integer
indices and numeric values as finite floats; text only appears at the I/O
boundary.  Schemas and instances are immutable and safe to share.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass


class SchemaParseError(ValueError):
    """Malformed schema header line."""


class InstanceError(ValueError):
    """Instance does not conform to its schema."""


class SchemaMismatchError(ValueError):
    """Two schemas that were required to be identical differ."""


_ATTR_RE = re.compile(r"^([^,:{}()|]+):(numeric|nominal\((\d+)\))$")
_CLASS_RE = re.compile(r"^class\{(.+)\}$")


@dataclass(frozen=True)
class AttributeDecl:
    """One attribute: numeric when arity is None, else nominal with that arity."""

    name: str
    arity: int | None = None

    def __post_init__(self):
        if not self.name:
            raise SchemaParseError("attribute name must be non-empty")
        if self.arity is not None and self.arity < 2:
            raise SchemaParseError(
                f"nominal attribute {self.name!r} needs arity >= 2, got {self.arity}"
            )

    @property
    def is_nominal(self) -> bool:
        return self.arity is not None


@dataclass(frozen=True)
class Schema:
    attributes: tuple[AttributeDecl, ...]
    class_labels: tuple[str, ...]

    def __post_init__(self):
        if not self.attributes:
            raise SchemaParseError("schema needs at least one attribute")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise SchemaParseError(f"duplicate attribute name {dup!r}")
        if len(self.class_labels) < 2:
            raise SchemaParseError("schema needs at least 2 class labels")
        if len(set(self.class_labels)) != len(self.class_labels):
            raise SchemaParseError("duplicate class label")

    @property
    def num_attributes(self) -> int:
        return len(self.attributes)

    @property
    def num_nominal(self) -> int:
        return sum(1 for a in self.attributes if a.is_nominal)

    @property
    def num_numeric(self) -> int:
        return sum(1 for a in self.attributes if not a.is_nominal)

    @property
    def num_classes(self) -> int:
        return len(self.class_labels)

    def class_index(self, label: str) -> int:
        try:
            return self.class_labels.index(label)
        except ValueError:
            raise InstanceError(f"unknown class label {label!r}") from None

    def validate_instance(self, instance: "Instance") -> None:
        """Raise InstanceError unless the instance conforms to this schema."""
        values = instance.values
        if len(values) != len(self.attributes):
            raise InstanceError(
                f"expected {len(self.attributes)} values, got {len(values)}"
            )
        for attr, v in zip(self.attributes, values):
            if attr.arity is not None:
                if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < attr.arity:
                    raise InstanceError(
                        f"attribute {attr.name!r}: nominal index {v!r} not in [0, {attr.arity})"
                    )
            else:
                if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                    raise InstanceError(
                        f"attribute {attr.name!r}: numeric value {v!r} not finite"
                    )
        if not isinstance(instance.label, int) or not 0 <= instance.label < len(self.class_labels):
            raise InstanceError(
                f"class index {instance.label!r} not in [0, {len(self.class_labels)})"
            )


class Instance:
    """One labelled example: a value per attribute plus a class-label index."""

    __slots__ = ("values", "label")

    def __init__(self, values, label: int):
        self.values = tuple(values)
        self.label = label

    def __eq__(self, other):
        return (
            isinstance(other, Instance)
            and self.values == other.values
            and self.label == other.label
        )

    def __hash__(self):
        return hash((self.values, self.label))

    def __repr__(self):
        return f"Instance({self.values!r}, label={self.label})"


def parse_schema(header_line: str) -> Schema:
    """Parse a header like ``a:numeric,b:nominal(3),class{neg|pos}``.

    Raises SchemaParseError naming the offending token on any malformed
    token, duplicate name, arity < 2, or fewer than 2 class labels.
    """
    tokens = [t.strip() for t in header_line.strip().split(",")]
    if len(tokens) < 2:
        raise SchemaParseError(f"header needs attributes and a class token: {header_line!r}")
    class_match = _CLASS_RE.match(tokens[-1])
    if class_match is None:
        raise SchemaParseError(f"final token must be class{{...}}, got {tokens[-1]!r}")
    labels = class_match.group(1).split("|")
    if any(not lab for lab in labels):
        raise SchemaParseError(f"empty class label in {tokens[-1]!r}")
    if len(labels) < 2:
        raise SchemaParseError(f"need at least 2 class labels, got {tokens[-1]!r}")
    if len(set(labels)) != len(labels):
        raise SchemaParseError(f"duplicate class label in {tokens[-1]!r}")

    attrs = []
    for tok in tokens[:-1]:
        m = _ATTR_RE.match(tok)
        if m is None:
            raise SchemaParseError(f"malformed attribute token {tok!r}")
        name, kind, arity = m.group(1), m.group(2), m.group(3)
        if kind == "numeric":
            attrs.append(AttributeDecl(name))
        else:
            k = int(arity)
            if k < 2:
                raise SchemaParseError(f"arity < 2 in token {tok!r}")
            attrs.append(AttributeDecl(name, k))
    names = [a.name for a in attrs]
    for n in names:
        if names.count(n) > 1:
            raise SchemaParseError(f"duplicate attribute name {n!r}")
    return Schema(tuple(attrs), tuple(labels))


def schema_to_header(schema: Schema) -> str:
    """Inverse of parse_schema."""
    parts = [
        f"{a.name}:nominal({a.arity})" if a.is_nominal else f"{a.name}:numeric"
        for a in schema.attributes
    ]
    parts.append("class{" + "|".join(schema.class_labels) + "}")
    return ",".join(parts)
