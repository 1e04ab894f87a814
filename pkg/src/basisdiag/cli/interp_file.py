"""Line-oriented interpretation files.

    # comment
    object Q dim 2 basis Z|X|Y|custom
    structure Q vectors = <d*d entries, row-major, basis vectors as columns>
    structure Q delta = <d^3 entries>        (custom only, with gamma)
    structure Q gamma = <d entries>
    structure Q dualiser = <d*d entries>     (optional override)
    box U : 2x2 = 0 1 1 0                    (row-major; outputs before inputs)
    tag U unitary|permutation|phase

Entries are separated by whitespace or commas and use the diagram
language's complex literals (``1``, ``-0.5i``, ``0.7+0.7i``).
"""
from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .. import hilb
from .. import structures as st
from ..errors import BasisDiagError, ParseError
from .language import parse_complex

BASES = ("Z", "X", "Y", "custom")
TAGS = ("unitary", "permutation", "phase")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _err(msg: str, line: int) -> ParseError:
    return ParseError(msg, line, 1)


def _entries(text: str, line: int) -> np.ndarray:
    out = []
    for tok in text.replace(",", " ").split():
        try:
            out.append(parse_complex(tok))
        except ValueError:
            raise _err(f"bad complex entry {tok!r}", line) from None
    if not out:
        raise _err("no entries after '='", line)
    return np.array(out, dtype=np.complex128)


def _name(tok: str, line: int) -> str:
    if not _NAME.match(tok):
        raise _err(f"bad name {tok!r}", line)
    return tok


class _Object:
    def __init__(self, dim: int, basis: str, line: int):
        self.dim, self.basis, self.line = dim, basis, line
        self.parts: dict[str, np.ndarray] = {}

    def build(self, name: str) -> st.BasisStructure:
        d = self.dim
        dual = self.parts.get("dualiser")
        if dual is not None:
            dual = _shaped(dual, (d, d), f"dualiser of {name}", self.line)
        if self.basis != "custom":
            if d != 2:
                raise _err(f"built-in basis {self.basis} needs dim 2, got {d}", self.line)
            s = st.builtin(self.basis)
            return s if dual is None else st.BasisStructure(d, s.delta, s.gamma, s.name, dual)
        if "vectors" in self.parts:
            B = _shaped(self.parts["vectors"], (d, d), f"vectors of {name}", self.line)
            return st.from_basis(B, dual, name)
        if "delta" not in self.parts or "gamma" not in self.parts:
            raise _err(f"custom object {name} needs 'vectors' or both 'delta' and 'gamma'", self.line)
        delta = _shaped(self.parts["delta"], (d, d, d), f"delta of {name}", self.line)
        gamma = _shaped(self.parts["gamma"], (d,), f"gamma of {name}", self.line)
        return st.BasisStructure(d, delta, gamma, name, dual)


def _shaped(a: np.ndarray, shape: tuple, what: str, line: int) -> np.ndarray:
    if a.size != int(np.prod(shape)):
        raise _err(f"{what} needs {int(np.prod(shape))} entries, got {a.size}", line)
    return a.reshape(shape)


def loads(text: str) -> hilb.Interpretation:
    """Parse an interpretation file; errors carry the offending line number."""
    objects: dict[str, _Object] = {}
    boxes: dict[str, np.ndarray] = {}
    tags: dict[str, set[str]] = {}
    tag_lines: dict[str, int] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition("=")
        words = head.split()
        kw = words[0]
        if kw == "object":
            if _ or len(words) != 6 or words[2] != "dim" or words[4] != "basis":
                raise _err("expected 'object <name> dim <d> basis Z|X|Y|custom'", n)
            name = _name(words[1], n)
            if name in objects:
                raise _err(f"object {name} declared twice", n)
            if not words[3].isdigit() or int(words[3]) < 1:
                raise _err(f"bad dimension {words[3]!r}", n)
            if words[5] not in BASES:
                raise _err(f"unknown basis {words[5]!r}; choose one of {', '.join(BASES)}", n)
            objects[name] = _Object(int(words[3]), words[5], n)
        elif kw == "structure":
            if not _ or len(words) != 3:
                raise _err("expected 'structure <object> vectors|delta|gamma|dualiser = <entries>'", n)
            obj, part = words[1], words[2]
            if obj not in objects:
                raise _err(f"structure for undeclared object {obj!r}", n)
            if part not in ("vectors", "delta", "gamma", "dualiser"):
                raise _err(f"unknown structure part {part!r}", n)
            if part != "dualiser" and objects[obj].basis != "custom":
                raise _err(f"object {obj} uses a built-in basis; only 'dualiser' may be overridden", n)
            objects[obj].parts[part] = _entries(rest, n)
        elif kw == "box":
            if not _ or len(words) != 4 or words[2] != ":":
                raise _err("expected 'box <name> : <d1>x<d2>... = <entries>'", n)
            name = _name(words[1], n)
            try:
                shape = tuple(int(k) for k in words[3].split("x"))
            except ValueError:
                raise _err(f"bad shape {words[3]!r}", n) from None
            boxes[name] = _shaped(_entries(rest, n), shape, f"box {name}", n)
        elif kw == "tag":
            if _ or len(words) < 3:
                raise _err("expected 'tag <box> <tag>...'", n)
            bad = [t for t in words[2:] if t not in TAGS]
            if bad:
                raise _err(f"unknown tag {bad[0]!r}; choose from {', '.join(TAGS)}", n)
            tags.setdefault(_name(words[1], n), set()).update(words[2:])
            tag_lines.setdefault(words[1], n)
        else:
            raise _err(f"unknown directive {kw!r}", n)
    structures = {}
    for name, o in objects.items():
        try:
            structures[name] = o.build(name)
        except ParseError:
            raise
        except BasisDiagError as e:
            raise _err(f"object {name}: {e}", o.line) from None
        report = st.check_basis(structures[name])
        if not report.ok:
            raise _err(f"object {name} is not a basis structure: fails {', '.join(report.failing())}", o.line)
    for name in tags:
        if name not in boxes:
            raise _err(f"tag for undeclared box {name!r}", tag_lines[name])
    return hilb.Interpretation(structures, boxes, tags)


def load(path: str | Path) -> hilb.Interpretation:
    return loads(Path(path).read_text())
