"""Reading and writing frequency tables.

Two equivalent on-disk forms:

* a keyed text format (``.tbl``)::

      # optional comments
      group cefaclor
      x0 9
      x1 7
      x2 23
      y0 20
      y1 34
      group amoxicillin
      ...

  ``x0/x1/x2`` count bilateral subjects by number of responding organs,
  ``y0/y1`` unilateral subjects.  Exactly two groups; missing keys are an
  error; counts must be non-negative integers.

* a JSON form::

      {"groups": [{"label": "cefaclor", "bilateral": [9, 7, 23],
                   "unilateral": [20, 34]}, ...]}
"""

from __future__ import annotations

import json
from importlib import resources

from .tables import FrequencyTable, TableError

__all__ = ["load_fixture", "parse_table_json", "parse_table_text",
           "read_table", "table_to_json", "table_to_text"]

_KEYS = ("x0", "x1", "x2", "y0", "y1")


class TableFormatError(TableError):
    """Malformed table file; the message carries line/field context."""


def parse_table_text(text: str) -> FrequencyTable:
    groups: list[dict] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 1)
        key = parts[0].lower()
        value = parts[1].strip() if len(parts) > 1 else ""
        if key == "group":
            groups.append({"label": value or f"group{len(groups) + 1}"})
            continue
        if key not in _KEYS:
            raise TableFormatError(f"line {lineno}: unknown key {parts[0]!r}")
        if not groups:
            raise TableFormatError(f"line {lineno}: {key!r} before any 'group' line")
        if key in groups[-1]:
            raise TableFormatError(f"line {lineno}: duplicate {key!r} in group "
                                   f"{groups[-1]['label']!r}")
        try:
            count = int(value)
        except ValueError:
            raise TableFormatError(
                f"line {lineno}: {key} needs an integer, got {value!r}") from None
        if count < 0:
            raise TableFormatError(f"line {lineno}: {key} is negative ({count})")
        groups[-1][key] = count
    if len(groups) != 2:
        raise TableFormatError(f"expected exactly 2 groups, found {len(groups)}")
    for g in groups:
        missing = [k for k in _KEYS if k not in g]
        if missing:
            raise TableFormatError(
                f"group {g['label']!r} is missing counts: {', '.join(missing)}")
    return FrequencyTable.from_counts(
        tuple(groups[0][k] for k in _KEYS),
        tuple(groups[1][k] for k in _KEYS),
        labels=(groups[0]["label"], groups[1]["label"]))


def table_to_text(table: FrequencyTable) -> str:
    lines = []
    for g in (0, 1):
        lines.append(f"group {table.labels[g]}")
        x0, x1, x2, y0, y1 = table.group_counts(g)
        for key, v in zip(_KEYS, (x0, x1, x2, y0, y1)):
            lines.append(f"{key} {v}")
    return "\n".join(lines) + "\n"


def parse_table_json(data) -> FrequencyTable:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise TableFormatError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict) or "groups" not in data:
        raise TableFormatError("JSON table needs a top-level 'groups' list")
    groups = data["groups"]
    if not isinstance(groups, list) or len(groups) != 2:
        raise TableFormatError("'groups' must list exactly 2 groups")
    parsed = []
    labels = []
    for i, g in enumerate(groups):
        if not isinstance(g, dict):
            raise TableFormatError(f"groups[{i}] must be an object")
        bi = g.get("bilateral")
        un = g.get("unilateral")
        if not isinstance(bi, list) or len(bi) != 3:
            raise TableFormatError(f"groups[{i}].bilateral must have 3 counts")
        if not isinstance(un, list) or len(un) != 2:
            raise TableFormatError(f"groups[{i}].unilateral must have 2 counts")
        parsed.append(tuple(bi) + tuple(un))
        labels.append(str(g.get("label", f"group{i + 1}")))
    try:
        return FrequencyTable.from_counts(parsed[0], parsed[1],
                                          labels=(labels[0], labels[1]))
    except TableError as exc:
        raise TableFormatError(str(exc)) from None


def table_to_json(table: FrequencyTable) -> dict:
    return {"groups": [
        {"label": table.labels[g],
         "bilateral": [int(v) for v in table.bilateral[g]],
         "unilateral": [int(v) for v in table.unilateral[g]]}
        for g in (0, 1)]}


def read_table(path: str) -> FrequencyTable:
    """Read a table file, dispatching on extension (.json vs keyed text)."""
    with open(path) as fh:
        text = fh.read()
    if not text.strip():
        raise TableFormatError(f"{path}: empty file")
    if path.endswith(".json") or text.lstrip().startswith("{"):
        return parse_table_json(text)
    return parse_table_text(text)


def load_fixture(name: str) -> FrequencyTable:
    """Bundled example datasets: ``ome`` (cured ears under two antibiotics)
    or ``orthok`` (improved myopic eyes under two lens designs)."""
    ref = resources.files("rhodiff.fixtures").joinpath(f"{name}.tbl")
    return parse_table_text(ref.read_text())
