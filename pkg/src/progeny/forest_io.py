"""Text and JSON serialization for forests.

Text format: first non-comment line ``n=<int>``, then one ``child parent``
line per edge. ``#`` starts a comment. JSON format:
``{"n": int, "parent": [int | null, ...]}``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional, Union

from .forest import Forest, ForestError, new_forest

__all__ = ["ForestSyntaxError", "parse_forest", "emit_forest", "read_forest", "write_forest"]


class ForestSyntaxError(ForestError):
    pass


def _parse_json(text: str) -> Forest:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ForestSyntaxError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "parent" not in obj:
        raise ForestSyntaxError('JSON forest needs a "parent" array')
    parent = obj["parent"]
    if not isinstance(parent, list):
        raise ForestSyntaxError('"parent" must be an array')
    n = obj.get("n", len(parent))
    if not isinstance(n, int) or isinstance(n, bool):
        raise ForestSyntaxError('"n" must be an integer')
    return new_forest(n, parent)


def _parse_text(text: str) -> Forest:
    n: Optional[int] = None
    parent: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            key, eq, val = line.partition("=")
            if not eq or key.strip() != "n":
                raise ForestSyntaxError(f"line {lineno}: expected 'n=<int>'")
            try:
                n = int(val)
            except ValueError:
                raise ForestSyntaxError(f"line {lineno}: bad vertex count {val!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ForestSyntaxError(f"line {lineno}: expected 'child parent'")
        try:
            child, par = int(parts[0]), int(parts[1])
        except ValueError:
            raise ForestSyntaxError(f"line {lineno}: non-integer vertex id") from None
        if child in parent:
            raise ForestSyntaxError(f"line {lineno}: vertex {child} has two out-edges")
        parent[child] = par
    if n is None:
        raise ForestSyntaxError("missing 'n=<int>' header")
    return new_forest(n, parent)


def parse_forest(text: str) -> Forest:
    """Parse either accepted format; JSON is detected by a leading ``{``."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_text(text)


def emit_forest(forest: Forest, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps({"n": forest.n, "parent": list(forest.parent)})
    if fmt == "text":
        lines = [f"n={forest.n}"]
        lines += [f"{c} {p}" for c, p in forest.edges()]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown forest format {fmt!r}")


def read_forest(path: Union[str, Path]) -> Forest:
    if str(path) == "-":
        return parse_forest(sys.stdin.read())
    return parse_forest(Path(path).read_text(encoding="utf-8"))


def write_forest(forest: Forest, path: Union[str, Path], fmt: str = "json") -> None:
    Path(path).write_text(emit_forest(forest, fmt), encoding="utf-8")
