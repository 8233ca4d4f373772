"""CSV dataset reading and writing.

Format: line 1 is the schema header (see schema.parse_schema), every other
line is one instance with comma-separated values, class label last.  Numeric
fields are rendered in shortest round-trip decimal form, nominal fields as
their integer value index (on input the form ``<attrname><index>`` is also
accepted).  UTF-8, ``\\n`` line endings.
"""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from .schema import (
    Instance,
    Schema,
    SchemaMismatchError,
    schema_to_header,
    parse_schema,
)


class CsvFormatError(ValueError):
    """Malformed data row; message carries the 1-based line number."""


def read_schema(path) -> Schema:
    """Parse the schema header of a dataset file."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
    if not header:
        raise CsvFormatError(f"{path}: empty file, no schema header")
    return parse_schema(header)


def _parse_nominal(text: str, attr, lineno: int) -> int:
    raw = text
    if text.startswith(attr.name):
        text = text[len(attr.name):]
    try:
        idx = int(text)
    except ValueError:
        raise CsvFormatError(
            f"line {lineno}: unknown nominal value {raw!r} for attribute {attr.name!r}"
        ) from None
    if not 0 <= idx < attr.arity:
        raise CsvFormatError(
            f"line {lineno}: unknown nominal value {raw!r} for attribute {attr.name!r}"
            f" (index {idx} not in [0, {attr.arity}))"
        )
    return idx


def read_csv(path, schema: Schema) -> Iterator[Instance]:
    """Yield instances from a dataset file, verifying its header matches."""
    with open(path, encoding="utf-8") as fh:
        header = fh.readline()
        if not header:
            raise CsvFormatError(f"{path}: empty file, no schema header")
        file_schema = parse_schema(header)
        if file_schema != schema:
            raise SchemaMismatchError(
                f"{path}: file schema {schema_to_header(file_schema)!r} does not match"
                f" expected {schema_to_header(schema)!r}"
            )
        attrs = schema.attributes
        n_fields = len(attrs) + 1
        label_index = {lab: i for i, lab in enumerate(schema.class_labels)}
        for lineno, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            fields = line.split(",")
            if len(fields) != n_fields:
                raise CsvFormatError(
                    f"line {lineno}: expected {n_fields} fields, got {len(fields)}"
                )
            values = []
            for attr, field in zip(attrs, fields):
                if attr.is_nominal:
                    values.append(_parse_nominal(field, attr, lineno))
                else:
                    try:
                        v = float(field)
                    except ValueError:
                        raise CsvFormatError(
                            f"line {lineno}: bad numeric value {field!r}"
                            f" for attribute {attr.name!r}"
                        ) from None
                    if not math.isfinite(v):
                        raise CsvFormatError(
                            f"line {lineno}: non-finite numeric value {field!r}"
                            f" for attribute {attr.name!r}"
                        )
                    values.append(v)
            label = label_index.get(fields[-1])
            if label is None:
                raise CsvFormatError(
                    f"line {lineno}: unknown class label {fields[-1]!r}"
                )
            yield Instance(values, label)


def _render_value(attr, v) -> str:
    if attr.is_nominal:
        return str(v)
    return repr(float(v))


def write_csv(path, schema: Schema, instances: Iterable[Instance]) -> None:
    """Write a dataset file; every instance is validated before any write."""
    rows = list(instances)
    for i, inst in enumerate(rows):
        try:
            schema.validate_instance(inst)
        except Exception as exc:
            raise type(exc)(f"instance {i}: {exc}") from None
    attrs = schema.attributes
    labels = schema.class_labels
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(schema_to_header(schema) + "\n")
        for inst in rows:
            fields = [_render_value(a, v) for a, v in zip(attrs, inst.values)]
            fields.append(labels[inst.label])
            fh.write(",".join(fields) + "\n")
