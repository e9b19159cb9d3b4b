import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from covering_lab import from_points, grid_zd, lshape_net, three_point_delta  # noqa: E402


@pytest.fixture
def line5():
    """grid_zd{1, 2}: the points -2..2 with counting measure."""
    return grid_zd(1, 2)


@pytest.fixture
def delta3():
    return three_point_delta()


def random_linf_space(rng: random.Random, n: int, dim: int = 2, side: int = 12,
                      zero_weights: bool = False):
    """n distinct random rational points in a cube, l-infinity metric, rational weights."""
    pts = set()
    while len(pts) < n:
        pts.add(tuple(Fraction(rng.randrange(side * 4), 4) for _ in range(dim)))
    choices = [Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 4), Fraction(5, 3)]
    if zero_weights:
        choices.append(Fraction(0))
    weights = [rng.choice(choices) for _ in range(n)]
    return from_points(sorted(pts), "linf", weights)


@st.composite
def small_spaces(draw, max_n=7, zero_weights=True):
    n = draw(st.integers(1, max_n))
    dim = draw(st.integers(1, 2))
    coords = draw(st.lists(st.tuples(*[st.integers(0, 8)] * dim), min_size=n, max_size=n,
                           unique=True))
    wopts = [0, 1, 2, Fraction(1, 2)] if zero_weights else [1, 2, Fraction(1, 2), 3]
    weights = draw(st.lists(st.sampled_from(wopts), min_size=n, max_size=n))
    if all(w == 0 for w in weights):
        weights[0] = 1
    norm = draw(st.sampled_from(["linf", "l1"]))
    return from_points([[Fraction(c, 2) for c in p] for p in coords], norm, weights)


EXAMPLE_SPACES = {
    "line5": lambda: grid_zd(1, 2),
    "delta3": three_point_delta,
    "grid2": lambda: grid_zd(2, 2),
    "lshape": lambda: lshape_net(Fraction(1, 6)),
    "nu2": lambda: grid_zd(2, 2, Fraction(1, 4)),
}
