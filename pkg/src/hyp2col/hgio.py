"""Hypergraph and colouring serialization.

Text format: a header line "n m k", then one edge per line as k space-separated
1-based vertex ids.  Colourings are a single 0/1 string (vertex 1 first).
Paths ending in ``.json`` use the JSON mirror of the same content.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Union

from .core import Colouring, Hypergraph
from .errors import ParseError

PathLike = Union[str, Path]


def hypergraph_to_json_dict(h: Hypergraph) -> dict:
    return {"n": h.n, "m": h.m, "k": h.k, "edges": [list(e) for e in h.edges]}


def hypergraph_from_json_dict(data: dict) -> Hypergraph:
    try:
        n = int(data["n"])
        k = int(data["k"])
        edges = tuple(tuple(sorted(int(v) for v in e)) for e in data["edges"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed hypergraph JSON: {exc}") from exc
    if "m" in data and int(data["m"]) != len(edges):
        raise ParseError(f"header m={data['m']} but {len(edges)} edges present")
    return Hypergraph(n=n, k=k, edges=edges)


def hypergraph_to_text(h: Hypergraph) -> str:
    lines = [f"{h.n} {h.m} {h.k}"]
    lines.extend(" ".join(str(v) for v in e) for e in h.edges)
    return "\n".join(lines) + "\n"


def hypergraph_from_text(text: str) -> Hypergraph:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty hypergraph file", line=1)
    head = lines[0].split()
    if len(head) != 3:
        raise ParseError(f"header must be 'n m k', got {lines[0]!r}", line=1)
    try:
        n, m, k = (int(x) for x in head)
    except ValueError as exc:
        raise ParseError(f"non-integer header field in {lines[0]!r}", line=1) from exc
    edges = []
    lineno = 1
    for raw in lines[1:]:
        lineno += 1
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != k:
            raise ParseError(f"expected {k} vertex ids, got {len(parts)}", line=lineno)
        try:
            verts = sorted(int(x) for x in parts)
        except ValueError as exc:
            raise ParseError(f"non-integer vertex id in {raw!r}", line=lineno) from exc
        if len(set(verts)) != k:
            raise ParseError(f"repeated vertex in edge {raw!r}", line=lineno)
        if verts[0] < 1 or verts[-1] > n:
            raise ParseError(f"vertex outside [1, {n}] in edge {raw!r}", line=lineno)
        edges.append(tuple(verts))
    if len(edges) != m:
        raise ParseError(f"header promises {m} edges, file has {len(edges)}")
    return Hypergraph(n=n, k=k, edges=tuple(edges))


def save_hypergraph(h: Hypergraph, path: PathLike) -> None:
    """Write text format, or the JSON mirror when the path ends in .json."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(hypergraph_to_json_dict(h), indent=2) + "\n")
    else:
        path.write_text(hypergraph_to_text(h))


def load_hypergraph(path: PathLike) -> Hypergraph:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        return hypergraph_from_json_dict(data)
    return hypergraph_from_text(text)


def save_colouring(c: Colouring, path: PathLike) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps({"n": c.n, "bits": c.to_string()}) + "\n")
    else:
        path.write_text(c.to_string() + "\n")


def load_colouring(path: PathLike) -> Colouring:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        try:
            data = json.loads(text)
            bits = data["bits"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"invalid colouring JSON: {exc}") from exc
        return Colouring.from_string(bits)
    s = text.strip()
    if not s or any(ch not in "01" for ch in s):
        raise ParseError("colouring file must hold a single 0/1 string", line=1)
    return Colouring.from_string(s)
