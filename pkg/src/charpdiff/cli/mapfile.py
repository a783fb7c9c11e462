"""Map-description files: a line-oriented key/value tree.

See ``docs/map-format.md`` for the grammar.  Example::

    format: charpdiff-map/1
    p: 3
    source.n: 1
    target.n: 1
    image.x1: x1
    image.d1: d1 + x1^2
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..diffop import DiffOperator
from ..morita import GeneratorImagesMap, MatrixOperator
from .expr import ParseError, evaluate, make_chart

FORMAT_TAG = "charpdiff-map/1"

_ENTRY = re.compile(
    r"(?P<key>[A-Za-z_][A-Za-z_0-9]*(?:\.[A-Za-z_][A-Za-z_0-9]*)*)"
    r"(?:\[(?P<row>\d+)\s*,\s*(?P<col>\d+)\])?\s*:\s*(?P<value>.*)\Z"
)
_GEN = re.compile(r"(?:[xd][1-9]\d*|finv)\Z")
_SCALAR_KEYS = ("format", "p", "size", "source.n", "source.f", "target.n", "target.f")


class MapFormatError(ValueError):
    def __init__(self, message, line=None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")
        self.line = line


@dataclass
class MapDescription:
    p: int
    source_n: int
    source_f: str
    target_n: int
    target_f: str
    size: int
    # generator name -> {(row, col): (expression text, line number)}
    images: dict = field(default_factory=dict)

    def build(self) -> GeneratorImagesMap:
        try:
            source = make_chart(self.p, self.source_n, self.source_f)
            target = make_chart(self.p, self.target_n, self.target_f)
        except ValueError as exc:
            raise MapFormatError(f"bad chart: {exc}") from None
        names = [f"x{i}" for i in range(1, source.n + 1)]
        names += [f"d{i}" for i in range(1, source.n + 1)]
        if not source.is_affine:
            names.append("finv")
        for name in self.images:
            if name not in names:
                raise MapFormatError(f"image given for unknown generator {name!r}")
        mats = {}
        for name in names:
            if name not in self.images:
                raise MapFormatError(f"missing image for generator {name!r}")
            zero = DiffOperator.zero(target)
            rows = [[zero] * self.size for _ in range(self.size)]
            for (r, c), (text, line) in self.images[name].items():
                if not (1 <= r <= self.size and 1 <= c <= self.size):
                    raise MapFormatError(f"entry [{r},{c}] outside {self.size}x{self.size}", line)
                try:
                    rows[r - 1][c - 1] = evaluate(text, target, "operator")
                except ParseError as exc:
                    raise MapFormatError(f"image.{name}[{r},{c}]: {exc}", line) from None
            mats[name] = MatrixOperator(target, rows)
        n = source.n
        return GeneratorImagesMap(
            source=source,
            target=target,
            size=self.size,
            x_images=tuple(mats[f"x{i}"] for i in range(1, n + 1)),
            d_images=tuple(mats[f"d{i}"] for i in range(1, n + 1)),
            finv_image=mats.get("finv"),
        )


def _int(value, key, line, minimum):
    if not re.fullmatch(r"\d+", value):
        raise MapFormatError(f"{key} must be an integer", line)
    v = int(value)
    if v < minimum:
        raise MapFormatError(f"{key} must be at least {minimum}", line)
    return v


def parse_map_text(text: str) -> MapDescription:
    scalars = {}
    images = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _ENTRY.match(line)
        if m is None:
            raise MapFormatError("expected 'key: value'", lineno)
        key, value = m["key"], m["value"].strip()
        if not value:
            raise MapFormatError(f"empty value for {key}", lineno)
        if key.startswith("image."):
            gen = key[len("image."):]
            if not _GEN.match(gen):
                raise MapFormatError(f"bad generator name {gen!r}", lineno)
            cell = (int(m["row"]), int(m["col"])) if m["row"] else (1, 1)
            table = images.setdefault(gen, {})
            if cell in table:
                raise MapFormatError(f"duplicate entry image.{gen}[{cell[0]},{cell[1]}]", lineno)
            table[cell] = (value, lineno)
            continue
        if m["row"]:
            raise MapFormatError(f"{key} does not take a matrix index", lineno)
        if key not in _SCALAR_KEYS:
            raise MapFormatError(f"unknown key {key!r}", lineno)
        if key in scalars:
            raise MapFormatError(f"duplicate key {key!r}", lineno)
        scalars[key] = (value, lineno)

    for key in ("format", "p", "source.n", "target.n"):
        if key not in scalars:
            raise MapFormatError(f"missing required key {key!r}")
    fmt, line = scalars["format"]
    if fmt != FORMAT_TAG:
        raise MapFormatError(f"unsupported format {fmt!r} (expected {FORMAT_TAG})", line)
    size_v, size_line = scalars.get("size", ("1", None))
    return MapDescription(
        p=_int(scalars["p"][0], "p", scalars["p"][1], 2),
        source_n=_int(scalars["source.n"][0], "source.n", scalars["source.n"][1], 1),
        source_f=scalars.get("source.f", ("1", None))[0],
        target_n=_int(scalars["target.n"][0], "target.n", scalars["target.n"][1], 1),
        target_f=scalars.get("target.f", ("1", None))[0],
        size=_int(size_v, "size", size_line, 1),
        images=images,
    )


def load_map(path) -> GeneratorImagesMap:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return parse_map_text(text).build()
