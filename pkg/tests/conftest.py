import random

import hypothesis.strategies as st

from symgrid import Grid


@st.composite
def grids(draw, max_side=12, colors=10):
    h = draw(st.integers(min_value=1, max_value=max_side))
    w = draw(st.integers(min_value=1, max_value=max_side))
    rows = draw(
        st.lists(
            st.lists(st.integers(0, colors - 1), min_size=w, max_size=w),
            min_size=h,
            max_size=h,
        )
    )
    return Grid.from_rows(rows)


def random_grid(rng: random.Random, max_side=30, colors=10, min_side=1) -> Grid:
    h = rng.randint(min_side, max_side)
    w = rng.randint(min_side, max_side)
    return Grid.from_rows(
        [[rng.randrange(colors) for _ in range(w)] for _ in range(h)]
    )
