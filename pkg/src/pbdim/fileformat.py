"""Plain-text design files.

A file is a header line followed by point lists::

    # comments and blank lines are ignored
    gdd 8 sizes 3
    group 0 1
    ...
    block 0 2 4
    ...

The header is ``pbd V`` or ``gdd V``, optionally followed by ``sizes k1 k2 ...``.
Point lists are written sorted and lines are written in sorted order, so
serializing the same design twice gives identical bytes.  The JSON form
carries the same content as one object.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Iterable, TextIO

from .designs import GroupDesign, PBDesign, _trusted
from .errors import FormatError


def _point_line(tokens: list[str], v: int, lineno: int) -> tuple[int, ...]:
    try:
        pts = sorted(int(t) for t in tokens)
    except ValueError:
        raise FormatError(f"non-integer point in {' '.join(tokens)!r}", lineno) from None
    if not pts:
        raise FormatError("empty point list", lineno)
    if pts[0] < 0 or pts[-1] >= v:
        bad = pts[0] if pts[0] < 0 else pts[-1]
        raise FormatError(f"point {bad} outside 0..{v - 1}", lineno)
    for a, b in zip(pts, pts[1:]):
        if a == b:
            raise FormatError(f"point {a} repeated", lineno)
    return tuple(pts)


def _parse_header(tokens: list[str], lineno: int):
    kind = tokens[0]
    if kind not in ("pbd", "gdd") or len(tokens) < 2:
        raise FormatError("header must be 'pbd V' or 'gdd V' with optional 'sizes ...'", lineno)
    try:
        v = int(tokens[1])
    except ValueError:
        raise FormatError(f"bad point count {tokens[1]!r}", lineno) from None
    if v < 1:
        raise FormatError("point count must be positive", lineno)
    sizes = None
    rest = tokens[2:]
    if rest:
        if rest[0] != "sizes" or len(rest) < 2:
            raise FormatError("expected 'sizes k1 k2 ...' after the point count", lineno)
        try:
            sizes = frozenset(int(t) for t in rest[1:])
        except ValueError:
            raise FormatError("non-integer block size", lineno) from None
    return kind, v, sizes


def parse_lines(lines: Iterable[str]):
    """Parse a text design; raises :class:`FormatError` with the line number."""
    kind = None
    v = 0
    sizes = None
    groups: list[tuple[int, ...]] = []
    blocks: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0]
        tokens = line.split()
        if not tokens:
            continue
        if kind is None:
            kind, v, sizes = _parse_header(tokens, lineno)
            continue
        tag = tokens[0]
        if tag == "block":
            blocks.append(_point_line(tokens[1:], v, lineno))
        elif tag == "group":
            if kind != "gdd":
                raise FormatError("group line in a pbd file", lineno)
            groups.append(_point_line(tokens[1:], v, lineno))
        else:
            raise FormatError(f"unknown line tag {tag!r}", lineno)
    if kind is None:
        raise FormatError("missing header")
    blocks.sort()
    if kind == "pbd":
        return _trusted(PBDesign, v, tuple(blocks), sizes)
    seen = set()
    for g in groups:
        for p in g:
            if p in seen:
                raise FormatError(f"point {p} lies in two groups")
            seen.add(p)
    groups.sort()
    return _trusted(GroupDesign, v, tuple(blocks), sizes, tuple(groups))


def _from_json(obj: dict):
    try:
        kind, v = obj["kind"], int(obj["v"])
        sizes = obj.get("sizes")
        lines = [f"{kind} {v}" + (" sizes " + " ".join(map(str, sizes)) if sizes else "")]
        lines += ["group " + " ".join(map(str, g)) for g in obj.get("groups") or []]
        lines += ["block " + " ".join(map(str, b)) for b in obj["blocks"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed JSON design: {exc}") from None
    return parse_lines(lines)


def parse_design(text: str):
    """Parse either the line format or its JSON form."""
    if text.lstrip().startswith("{"):
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid JSON: {exc}") from None
        return _from_json(obj)
    return parse_lines(text.splitlines())


def _header(design, sizes) -> str:
    kind = "gdd" if isinstance(design, GroupDesign) else "pbd"
    sizes = design.sizes if sizes is None else frozenset(sizes)
    head = f"{kind} {design.v}"
    if sizes:
        head += " sizes " + " ".join(map(str, sorted(sizes)))
    return head


def iter_lines(design, sizes: Iterable[int] | None = None):
    yield _header(design, sizes)
    if isinstance(design, GroupDesign):
        for g in design.groups:
            yield "group " + " ".join(map(str, g))
    for b in design.blocks:
        yield "block " + " ".join(map(str, b))


def serialize_design(design, sizes: Iterable[int] | None = None) -> str:
    return "\n".join(iter_lines(design, sizes)) + "\n"


def design_to_json(design, sizes: Iterable[int] | None = None) -> dict:
    sizes = design.sizes if sizes is None else frozenset(sizes)
    out = {"kind": "gdd" if isinstance(design, GroupDesign) else "pbd", "v": design.v,
           "sizes": sorted(sizes) if sizes else None}
    if isinstance(design, GroupDesign):
        out["groups"] = [list(g) for g in design.groups]
    out["blocks"] = [list(b) for b in design.blocks]
    return out


def _write(design, stream: TextIO, sizes, as_json: bool):
    if as_json:
        json.dump(design_to_json(design, sizes), stream, separators=(",", ":"))
        stream.write("\n")
        return
    batch = []
    for line in iter_lines(design, sizes):
        batch.append(line)
        if len(batch) >= 65536:
            stream.write("\n".join(batch) + "\n")
            batch.clear()
    if batch:
        stream.write("\n".join(batch) + "\n")


def write_design(design, path: str | Path, *, sizes: Iterable[int] | None = None, as_json: bool = False):
    """Write to ``path``; ``-`` means stdout."""
    if str(path) == "-":
        _write(design, sys.stdout, sizes, as_json)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        _write(design, fh, sizes, as_json)


def read_design(path: str | Path):
    """Read from ``path``; ``-`` means stdin."""
    if str(path) == "-":
        return parse_design(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    return parse_design(text)
