"""Reading and writing ``.gifs`` system files, plus the built-in example systems.

Format (line oriented; ``#`` starts a comment, blank lines are ignored)::

    gifs 1
    dims M p D
    map <name>
    <row 1 of [blocks[0] | ... | blocks[p-1] | offset]>
    ...
    <row M>
    map <name>
    ...

Each row holds p*M + 1 decimal numbers separated by single spaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .core import (AffineMap, ContractionViolation, DimensionMismatch, GifsError, GifsSystem,
                   RangeViolation, build_system)


FORMAT_VERSION = 1

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")
_INT = re.compile(r"[1-9]\d*\Z")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-]*\Z")


class GifsSyntaxError(GifsError, ValueError):
    def __init__(self, line: int, col: int, expected: str, found: str = ""):
        self.line = line
        self.col = col
        self.expected = expected
        self.found = found
        got = f", found {found!r}" if found else ""
        super().__init__(f"{line}:{col}: expected {expected}{got}")


class SemanticError(GifsError, ValueError):
    """Wraps ContractionViolation, RangeViolation or DimensionMismatch."""

    def __init__(self, cause: Exception):
        self.cause = cause
        super().__init__(f"{type(cause).__name__}: {cause}")


class UnknownExample(GifsError, KeyError):
    pass


@dataclass(frozen=True)
class MapEntry:
    name: str
    rows: tuple[tuple[float, ...], ...]  # M rows of p*M + 1 coefficients


@dataclass(frozen=True)
class SystemDocument:
    M: int
    p: int
    D: float
    maps: tuple[MapEntry, ...]
    comments: tuple[str, ...] = field(default=())

    @property
    def L(self) -> int:
        return len(self.maps)

    def affine_maps(self) -> list[AffineMap]:
        return [AffineMap.from_rows(m.rows, self.p) for m in self.maps]

    def build(self, range_policy: str = "strict") -> GifsSystem:
        try:
            return build_system(self.affine_maps(), self.D, self.p, self.M, range_policy)
        except (ContractionViolation, RangeViolation, DimensionMismatch) as exc:
            raise SemanticError(exc) from exc


def document_from_system(system: GifsSystem, names=None, comments=()) -> SystemDocument:
    names = names or [f"f{i}" for i in range(1, system.L + 1)]
    maps = tuple(MapEntry(nm, tuple(tuple(float(x) for x in row) for row in f.rows()))
                 for nm, f in zip(names, system.maps))
    return SystemDocument(system.M, system.p, system.D, maps, tuple(comments))


def _tokens(line: str) -> list[tuple[int, str]]:
    """(1-based column, token) pairs of the non-comment part of a line."""
    body = line.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in re.finditer(r"\S+", body)]


def parse_document(text: str) -> SystemDocument:
    comments: list[str] = []
    lines: list[tuple[int, list[tuple[int, str]]]] = []
    last_line = 1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        stripped = raw.lstrip()
        if stripped.startswith("#"):
            c = stripped[1:]
            comments.append(c[1:] if c.startswith(" ") else c)
            continue
        toks = _tokens(raw)
        if toks:
            lines.append((lineno, toks))
    pos = 0

    def expect_line(what: str) -> tuple[int, list[tuple[int, str]]]:
        if pos >= len(lines):
            end = last_line + 1 if text.endswith("\n") else last_line
            raise GifsSyntaxError(end if text else 1, 1, what, "end of input")
        return lines[pos]

    def keyword_line(kw: str, n_args: int, what: str):
        lineno, toks = expect_line(what)
        if toks[0][1] != kw:
            raise GifsSyntaxError(lineno, toks[0][0], f"'{kw}'", toks[0][1])
        if len(toks) != n_args + 1:
            col = toks[-1][0] + len(toks[-1][1]) if len(toks) <= n_args else toks[n_args + 1][0]
            found = "" if len(toks) <= n_args else toks[n_args + 1][1]
            raise GifsSyntaxError(lineno, col, f"{n_args} argument(s) after '{kw}'", found)
        return lineno, toks[1:]

    lineno, args = keyword_line("gifs", 1, "'gifs <version>' header")
    if args[0][1] != str(FORMAT_VERSION):
        raise GifsSyntaxError(lineno, args[0][0], f"format version {FORMAT_VERSION}", args[0][1])
    pos += 1

    lineno, args = keyword_line("dims", 3, "'dims M p D'")
    for (col, tok), what in zip(args[:2], ("M", "p")):
        if not _INT.match(tok):
            raise GifsSyntaxError(lineno, col, f"positive integer {what}", tok)
    if not _NUMBER.match(args[2][1]) or float(args[2][1]) <= 0:
        raise GifsSyntaxError(lineno, args[2][0], "positive decimal D", args[2][1])
    M, p, D = int(args[0][1]), int(args[1][1]), float(args[2][1])
    pos += 1

    width = p * M + 1
    maps: list[MapEntry] = []
    names: set[str] = set()
    while pos < len(lines):
        lineno, args = keyword_line("map", 1, "'map <name>'")
        col, name = args[0]
        if not _NAME.match(name):
            raise GifsSyntaxError(lineno, col, "map name (letter or '_' first)", name)
        if name in names:
            raise GifsSyntaxError(lineno, col, "a map name not used before", name)
        names.add(name)
        pos += 1
        rows = []
        for r in range(M):
            lineno, toks = expect_line(f"coefficient row {r + 1} of map {name}")
            for col, tok in toks:
                if not _NUMBER.match(tok):
                    raise GifsSyntaxError(lineno, col, "decimal number", tok)
            if len(toks) != width:
                col = toks[width][0] if len(toks) > width else toks[-1][0] + len(toks[-1][1])
                raise GifsSyntaxError(lineno, col, f"{width} numbers per row, got {len(toks)}")
            rows.append(tuple(float(tok) for _, tok in toks))
            pos += 1
        maps.append(MapEntry(name, tuple(rows)))
    if not maps:
        expect_line("'map <name>'")
    return SystemDocument(M, p, D, tuple(maps), tuple(comments))


def parse_system(text: str, range_policy: str = "strict") -> GifsSystem:
    return parse_document(text).build(range_policy)


def serialize_document(doc: SystemDocument) -> str:
    out = [f"# {c}" if c else "#" for c in doc.comments]
    out.append(f"gifs {FORMAT_VERSION}")
    out.append(f"dims {doc.M} {doc.p} {doc.D!r}")
    for m in doc.maps:
        out.append(f"map {m.name}")
        out.extend(" ".join(repr(float(x)) for x in row) for row in m.rows)
    return "\n".join(out) + "\n"


def serialize_system(system: GifsSystem, names=None, comments=()) -> str:
    return serialize_document(document_from_system(system, names, comments))


def load_system(path, range_policy: str = "strict") -> GifsSystem:
    return parse_system(Path(path).read_text(encoding="utf-8"), range_policy)


def save_system(system: GifsSystem, path, names=None, comments=()) -> None:
    Path(path).write_text(serialize_system(system, names, comments), encoding="utf-8")


# Coefficient rows [first argument block | second argument block | offset], with
# x = (x1, y1) the first argument and y = (x2, y2) the second.
_EXAMPLES = {
    "A": {
        "comments": ("Example A: three maps on [0,1]^2, order 2",),
        "maps": {
            # f1(x,y) = (0.2x1 + 0.2y2 ; 0.2x2 + 0.1y2)
            "f1": [[0.2, 0.0, 0.0, 0.2, 0.0],
                   [0.0, 0.0, 0.2, 0.1, 0.0]],
            # f2(x,y) = (0.15x1 + 0.07x2 + 0.4 ; 0.15y1 + 0.07y2)
            "f2": [[0.15, 0.0, 0.07, 0.0, 0.4],
                   [0.0, 0.15, 0.0, 0.07, 0.0]],
            # f3(x,y) = (0.15y1 + 0.07x2 ; 0.15x1 + 0.07y2 + 0.04), transcribed as printed
            "f3": [[0.0, 0.15, 0.07, 0.0, 0.0],
                   [0.15, 0.0, 0.0, 0.07, 0.04]],
        },
        "policy": "strict",
    },
    "B": {
        "comments": ("Example B: two maps on [0,1]^2, order 2",
                     "the maps leave the unit square; runs clamp to it"),
        "maps": {
            # f1(x,y) = (0.1x1 + 0.16y1 - 0.01x2 + 0.3y2 ; -0.05y1 + 0.15x2 + 0.15y2)
            "f1": [[0.1, 0.16, -0.01, 0.3, 0.0],
                   [0.0, -0.05, 0.15, 0.15, 0.0]],
            # f2(x,y) = (0.09x1 - 0.1y1 - 0.15x2 + 0.14y2 + 0.4 ; 0.14x1 + 0.14y1 + 0.14x2 + 0.04)
            "f2": [[0.09, -0.1, -0.15, 0.14, 0.4],
                   [0.14, 0.14, 0.14, 0.0, 0.04]],
        },
        "policy": "clamp",
    },
    "C": {
        "comments": ("Example C: two maps on [0,1]^2, order 2",
                     "f1 leaves the unit square on part of its domain; runs clamp to it"),
        "maps": {
            # f1(x,y) = (0.5x1 - 0.5y1 + 0.001x2 + 0.45 ; 0.5x1 + 0.5y1 + 0.001y2 - 0.05)
            "f1": [[0.5, -0.5, 0.001, 0.0, 0.45],
                   [0.5, 0.5, 0.0, 0.001, -0.05]],
            # f2(x,y) = (0.2x1 + 0.01x2 + 0.14y2 + 0.147 ; 0.2y1 + 0.01y2 + 0.105)
            "f2": [[0.2, 0.0, 0.01, 0.14, 0.147],
                   [0.0, 0.2, 0.0, 0.01, 0.105]],
        },
        "policy": "clamp",
    },
}


# f3 of Example A with both arguments swapped in the same way, for visual comparison.
_A_SYMMETRIC_F3 = [[0.0, 0.15, 0.0, 0.07, 0.0],
                   [0.15, 0.0, 0.07, 0.0, 0.04]]


BUILTIN_NAMES = tuple(_EXAMPLES)


def builtin_document(name: str, symmetric_f3: bool = False) -> SystemDocument:
    try:
        spec = _EXAMPLES[name.upper()]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None
    rows = dict(spec["maps"])
    if symmetric_f3:
        if name.upper() != "A":
            raise ValueError("the symmetric f3 variant exists for example A only")
        rows["f3"] = _A_SYMMETRIC_F3
    maps = tuple(MapEntry(nm, tuple(tuple(r) for r in rs)) for nm, rs in rows.items())
    return SystemDocument(2, 2, 1.0, maps, spec["comments"])


def builtin(name: str, symmetric_f3: bool = False) -> GifsSystem:
    """Example system A, B or C on [0, 1]^2 with p = 2."""
    doc = builtin_document(name, symmetric_f3)
    return doc.build(_EXAMPLES[name.upper()]["policy"])


def builtin_policy(name: str) -> str:
    return _EXAMPLES[name.upper()]["policy"]
