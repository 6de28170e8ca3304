"""Grid values, the task file format, and the markdown grid codec.

A grid is a rectangular matrix of color indices 0..9, at most 30x30,
stored row-major with (row, column) addressing and row 0 at the top.
Grids are immutable and hashable, so they can be shared freely and used
as dictionary keys during voting and deduplication.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import GridValidationError, MarkdownError, TaskFormatError

MAX_SIDE = 30
NUM_COLORS = 10

Coord = tuple[int, int]


def _check_cell(value: object, where: str) -> int:
    if type(value) is not int:
        raise GridValidationError(f"{where}: cell value {value!r} is not an integer")
    if not 0 <= value < NUM_COLORS:
        raise GridValidationError(f"{where}: cell value {value} out of range 0..9")
    return value


@dataclass(frozen=True)
class Grid:
    """Immutable rectangular grid of colors 0..9."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.rows:
            raise GridValidationError("grid has no rows")
        h = len(self.rows)
        w = len(self.rows[0])
        if w == 0:
            raise GridValidationError("grid row 0 is empty")
        if h > MAX_SIDE:
            raise GridValidationError(f"height {h} exceeds {MAX_SIDE}")
        if w > MAX_SIDE:
            raise GridValidationError(f"width {w} exceeds {MAX_SIDE}")
        for r, row in enumerate(self.rows):
            if len(row) != w:
                raise GridValidationError(
                    f"row {r} has width {len(row)}, expected {w}"
                )
            for c, v in enumerate(row):
                _check_cell(v, f"cell ({r},{c})")

    @classmethod
    def from_rows(cls, rows: list[list[int]]) -> "Grid":
        return cls(tuple(tuple(row) for row in rows))

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    @property
    def dims(self) -> tuple[int, int]:
        return (self.height, self.width)

    def cell(self, r: int, c: int) -> int:
        return self.rows[r][c]

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.rows]

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Grid({self.to_lists()!r})"


@dataclass(frozen=True)
class Task:
    """A few-shot puzzle: train input/output pairs plus test inputs.

    Test expected outputs are optional; they are present in scored
    datasets and absent in blind ones.
    """

    train: tuple[tuple[Grid, Grid], ...]
    test: tuple[tuple[Grid, Grid | None], ...]

    def __post_init__(self) -> None:
        if not self.train:
            raise TaskFormatError("task has no train pairs")
        if not self.test:
            raise TaskFormatError("task has no test inputs")


def grids_equal(a: Grid, b: Grid) -> bool:
    """Exact comparison: identical dimensions and identical cells."""
    return a.rows == b.rows


def pixel_distance(a: Grid, b: Grid) -> int:
    """Differing-cell count when shapes match; a shape mismatch scores
    b's area + 1, strictly worse than any same-shape disagreement."""
    if a.dims != b.dims:
        return b.height * b.width + 1
    return sum(
        1 for ra, rb in zip(a.rows, b.rows) for va, vb in zip(ra, rb) if va != vb
    )


def _grid_from_json(node: object, path: str) -> Grid:
    if not isinstance(node, list) or not node:
        raise TaskFormatError(f"{path}: expected a non-empty array of rows")
    rows = []
    width = None
    for r, row in enumerate(node):
        if not isinstance(row, list) or not row:
            raise TaskFormatError(f"{path}[{r}]: expected a non-empty array of cells")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise TaskFormatError(
                f"{path}[{r}]: row width {len(row)} differs from {width}"
            )
        cells = []
        for c, v in enumerate(row):
            try:
                cells.append(_check_cell(v, f"{path}[{r}][{c}]"))
            except GridValidationError as e:
                raise GridValidationError(str(e)) from None
        rows.append(tuple(cells))
    try:
        return Grid(tuple(rows))
    except GridValidationError as e:
        raise GridValidationError(f"{path}: {e}") from None


def parse_task(data: bytes | str) -> Task:
    """Parse a task document in the public JSON schema.

    Raises TaskFormatError for structural problems (the message names the
    offending path) and GridValidationError for out-of-range cells (the
    message carries the coordinates).
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise TaskFormatError(f"not valid UTF-8: {e}") from None
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as e:
        raise TaskFormatError(f"invalid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise TaskFormatError("top level: expected an object")
    for key in ("train", "test"):
        if key not in doc:
            raise TaskFormatError(f"top level: missing key {key!r}")
        if not isinstance(doc[key], list) or not doc[key]:
            raise TaskFormatError(f"{key}: expected a non-empty array")

    train = []
    for i, item in enumerate(doc["train"]):
        if not isinstance(item, dict):
            raise TaskFormatError(f"train[{i}]: expected an object")
        for key in ("input", "output"):
            if key not in item:
                raise TaskFormatError(f"train[{i}]: missing key {key!r}")
        train.append(
            (
                _grid_from_json(item["input"], f"train[{i}].input"),
                _grid_from_json(item["output"], f"train[{i}].output"),
            )
        )

    test = []
    for i, item in enumerate(doc["test"]):
        if not isinstance(item, dict):
            raise TaskFormatError(f"test[{i}]: expected an object")
        if "input" not in item:
            raise TaskFormatError(f"test[{i}]: missing key 'input'")
        expected = None
        if item.get("output") is not None:
            expected = _grid_from_json(item["output"], f"test[{i}].output")
        test.append((_grid_from_json(item["input"], f"test[{i}].input"), expected))

    return Task(train=tuple(train), test=tuple(test))


def serialize_task(task: Task) -> bytes:
    """Inverse of parse_task; emits compact UTF-8 JSON, order preserved."""
    doc: dict[str, list[dict[str, object]]] = {"train": [], "test": []}
    for gin, gout in task.train:
        doc["train"].append({"input": gin.to_lists(), "output": gout.to_lists()})
    for gin, expected in task.test:
        item: dict[str, object] = {"input": gin.to_lists()}
        if expected is not None:
            item["output"] = expected.to_lists()
        doc["test"].append(item)
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def encode_markdown(g: Grid) -> str:
    """Render a grid as a markdown-style table, one row per line.

    Cells are single digits separated by `|`, with leading and trailing
    `|` per row and no header. Deterministic; `\\n` joins rows.
    """
    return "\n".join("|" + "|".join(str(v) for v in row) + "|" for row in g.rows)


def decode_markdown(text: str) -> Grid:
    """Strict inverse of encode_markdown.

    Accepts the exact encoded form plus at most one trailing newline.
    Ragged rows raise MarkdownError (shape); non-digit cells raise
    MarkdownError naming row and column.
    """
    if not isinstance(text, str):
        raise MarkdownError("expected text")
    if text.endswith("\n"):
        text = text[:-1]
    if not text:
        raise MarkdownError("empty table")
    rows = []
    width = None
    for r, line in enumerate(text.split("\n")):
        if len(line) < 3 or line[0] != "|" or line[-1] != "|":
            raise MarkdownError(f"row {r}: not delimited by '|'")
        cells = line[1:-1].split("|")
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MarkdownError(
                f"row {r}: width {len(cells)} differs from width {width}"
            )
        parsed = []
        for c, cell in enumerate(cells):
            if len(cell) != 1 or not cell.isdigit():
                raise MarkdownError(f"row {r} column {c}: bad cell {cell!r}")
            parsed.append(int(cell))
        rows.append(tuple(parsed))
    try:
        return Grid(tuple(rows))
    except GridValidationError as e:
        raise MarkdownError(str(e)) from None
