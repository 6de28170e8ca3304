"""Bounded symbolic search over the taxonomy: the default proposer.

Candidates are generated cheapest-first (whole-grid kinds, then object
kinds with parameters read off the scene diff), deduplicated on their
canonical serialization, and each one is applied to the pair input and
kept only when it reproduces the output exactly or strictly reduces the
pixel distance to it. Generation order is deterministic, so repeated
runs return identical lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .errors import PatternApplicationError, PatternContractError
from .grid import Grid, grids_equal, pixel_distance
from .induction import match_objects
from .patterns import (
    DIRECTIONS,
    Selector,
    UnitPattern,
    apply_pattern,
    format_pattern,
    make_pattern,
)
from .perception import GridObject, Perception, segment

Pair = tuple[Grid, Grid]


@dataclass(frozen=True)
class FlaggedPattern:
    """A consistent candidate: exact reproduces the output, partial only
    narrows the pixel distance (recorded in ``distance``)."""

    pattern: UnitPattern
    exact: bool
    distance: int


def enumerate_candidates(
    pair: Pair, budget: int, connectivity: int = 4
) -> list[FlaggedPattern]:
    """Enumerate and consistency-check up to ``budget`` candidates."""
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    gin, gout = pair
    baseline = pixel_distance(gin, gout)
    seen: set[str] = set()
    out: list[FlaggedPattern] = []
    tested = 0
    for pattern in _proposals(gin, gout, connectivity):
        key = format_pattern(pattern)
        if key in seen:
            continue
        seen.add(key)
        tested += 1
        if tested > budget:
            break
        try:
            result = apply_pattern(pattern, gin, connectivity)
        except (PatternApplicationError, PatternContractError):
            continue
        if grids_equal(result, gout):
            out.append(FlaggedPattern(pattern, exact=True, distance=0))
        else:
            d = pixel_distance(result, gout)
            if d < baseline:
                out.append(FlaggedPattern(pattern, exact=False, distance=d))
    return out


@dataclass(frozen=True)
class SearchProposer:
    """Proposer backed by enumerate_candidates; the default backend."""

    connectivity: int = 4

    def propose(self, pair: Pair, budget: int) -> list[UnitPattern]:
        return [
            fp.pattern
            for fp in enumerate_candidates(pair, budget, self.connectivity)
        ]


def _ordered_unique(items):
    seen = set()
    out = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out


def _uniform_color(g: Grid) -> int | None:
    colors = {v for row in g.rows for v in row}
    return colors.pop() if len(colors) == 1 else None


def _size_rank(perception: Perception, obj: GridObject) -> int:
    ranked = sorted(perception.objects, key=lambda o: (-o.size, o.id))
    return next(i for i, o in enumerate(ranked) if o.id == obj.id)


def _proposals(gin: Grid, gout: Grid, connectivity: int) -> Iterator[UnitPattern]:
    """Yield parameterized patterns in the canonical cheapest-first order.

    Parameters are read off the pair: dimension ratios drive the scaling
    kinds, the cell diff drives the color kinds, and the object matching
    drives moves, deletions, and duplications. Identity parameterizations
    (translate(0,0), recolor(c,c), ...) are never generated.
    """
    hi, wi = gin.dims
    ho, wo = gout.dims
    same_dims = gin.dims == gout.dims
    transposed = (wi, hi) == (ho, wo)

    if same_dims:
        yield make_pattern("reflect_h")
        yield make_pattern("reflect_v")
    if transposed:
        yield make_pattern("rotate90")
    if same_dims:
        yield make_pattern("rotate180")
    if transposed:
        yield make_pattern("rotate270")
    if ho <= hi and wo <= wi:
        yield make_pattern("crop_to_content")
    if same_dims:
        yield make_pattern("symmetry_complete", axis="h")
        yield make_pattern("symmetry_complete", axis="v")
    if ho % hi == 0 and wo % wi == 0:
        f = ho // hi
        if f >= 2 and f == wo // wi:
            yield make_pattern("scale_up", factor=f)
    if hi % ho == 0 and wi % wo == 0:
        f = hi // ho
        if f >= 2 and f == wi // wo:
            yield make_pattern("scale_down", factor=f)
    if ho % hi == 0 and wo % wi == 0:
        r, c = ho // hi, wo // wi
        if (r, c) != (1, 1):
            yield make_pattern("tile_grid", rows=r, cols=c)
    if wi % 2 == 0 and (ho, wo) == (hi, wi // 2):
        yield make_pattern("overlay_pairs", axis="h")
    if hi % 2 == 0 and (ho, wo) == (hi // 2, wi):
        yield make_pattern("overlay_pairs", axis="v")
    if ho <= hi and wo <= wi:
        yield make_pattern("select_largest")
        yield make_pattern("select_smallest")

    pin = segment(gin, connectivity)

    target = _uniform_color(gout)
    if ho == 1 and target is not None:
        if len(pin.objects) == wo:
            yield make_pattern("count_encode", color=target)
        for color in sorted({o.color for o in pin.objects}):
            if sum(1 for o in pin.objects if o.color == color) == wo:
                yield make_pattern(
                    "count_encode", color=target, selector=Selector("color", color)
                )

    if not same_dims:
        return

    changed = [
        (r, c, gin.rows[r][c], gout.rows[r][c])
        for r in range(hi)
        for c in range(wi)
        if gin.rows[r][c] != gout.rows[r][c]
    ]
    color_moves = _ordered_unique((a, b) for _, _, a, b in changed)
    new_colors = _ordered_unique(b for _, _, _, b in changed)

    for src, dst in color_moves:
        yield make_pattern("recolor", src=src, dst=dst)

    if changed:
        mapping: dict[int, int] = {}
        functional = True
        for row_in, row_out in zip(gin.rows, gout.rows):
            for a, b in zip(row_in, row_out):
                if mapping.setdefault(a, b) != b:
                    functional = False
                    break
            if not functional:
                break
        if functional:
            pairs = tuple(sorted((a, b) for a, b in mapping.items() if a != b))
            if pairs:
                yield make_pattern("palette_swap", map=pairs)

    pout = segment(gout, connectivity)
    tags = match_objects(pin, pout)
    in_by_id = {o.id: o for o in pin.objects}
    out_by_id = {o.id: o for o in pout.objects}
    retained = [
        (in_by_id[t.input_id], out_by_id[t.output_id])
        for t in tags
        if t.tag == "retained"
    ]
    removed = [in_by_id[t.input_id] for t in tags if t.tag == "removed"]
    added = [out_by_id[t.output_id] for t in tags if t.tag == "added"]

    moved = []
    for a, b in retained:
        delta = (b.bbox[0] - a.bbox[0], b.bbox[1] - a.bbox[1])
        if delta != (0, 0):
            moved.append((a, delta))
    deltas = _ordered_unique(delta for _, delta in moved)
    for dr, dc in deltas:
        yield make_pattern("translate", dx=dc, dy=dr)
        for color in sorted(
            {a.color for a, delta in moved if delta == (dr, dc)}
        ):
            yield make_pattern(
                "translate", dx=dc, dy=dr, selector=Selector("color", color)
            )
    for a, (dr, dc) in moved:
        yield make_pattern(
            "translate",
            dx=dc,
            dy=dr,
            selector=Selector("size_rank", _size_rank(pin, a)),
        )

    if removed:
        yield make_pattern("delete_object")
        for color in sorted({o.color for o in removed}):
            yield make_pattern("delete_object", selector=Selector("color", color))
        for obj in removed:
            yield make_pattern(
                "delete_object", selector=Selector("size_rank", _size_rank(pin, obj))
            )
        for count in sorted({o.cavity_count for o in removed}):
            yield make_pattern("delete_object", selector=Selector("cavities", count))

    for out_obj in added:
        for in_obj in pin.objects:
            if in_obj.shape == out_obj.shape and in_obj.color == out_obj.color:
                dy = out_obj.bbox[0] - in_obj.bbox[0]
                dx = out_obj.bbox[1] - in_obj.bbox[1]
                if (dx, dy) == (0, 0):
                    continue
                yield make_pattern("duplicate_object", dx=dx, dy=dy)
                yield make_pattern(
                    "duplicate_object",
                    dx=dx,
                    dy=dy,
                    selector=Selector("color", in_obj.color),
                )
                yield make_pattern(
                    "duplicate_object",
                    dx=dx,
                    dy=dy,
                    selector=Selector("size_rank", _size_rank(pin, in_obj)),
                )

    holed = [o for o in pin.objects if o.cavity_count > 0]
    if holed and changed:
        holed_colors = sorted({o.color for o in holed})
        holed_counts = sorted({o.cavity_count for o in holed})
        for color in new_colors:
            yield make_pattern("cavity_fill", color=color)
            for oc in holed_colors:
                yield make_pattern(
                    "cavity_fill", color=color, selector=Selector("color", oc)
                )
            for count in holed_counts:
                yield make_pattern(
                    "cavity_fill", color=color, selector=Selector("cavities", count)
                )

    if pin.objects and changed:
        object_colors = sorted({o.color for o in pin.objects})
        for direction in DIRECTIONS:
            yield make_pattern("gravity_shift", dir=direction)
            for color in object_colors:
                yield make_pattern(
                    "gravity_shift", dir=direction, selector=Selector("color", color)
                )

        for color in new_colors:
            yield make_pattern("draw_bbox_border", color=color)
            for oc in object_colors:
                yield make_pattern(
                    "draw_bbox_border", color=color, selector=Selector("color", oc)
                )
            yield make_pattern(
                "draw_bbox_border", color=color, selector=Selector("size_rank", 0)
            )

        if len(pin.objects) >= 2:
            multi_colors = sorted(
                c
                for c in object_colors
                if sum(1 for o in pin.objects if o.color == c) >= 2
            )
            for color in new_colors:
                yield make_pattern("connect_objects", color=color)
                for oc in multi_colors:
                    yield make_pattern(
                        "connect_objects", color=color, selector=Selector("color", oc)
                    )
