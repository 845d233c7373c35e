from fractions import Fraction as F
from pathlib import Path

import pytest

from rank1_landscape.core import Instance, Point

FIXTURES = Path(__file__).parent / "fixtures"


def pt(x, y) -> Point:
    return Point(tuple(F(a) for a in x), tuple(F(b) for b in y))


def inst(u, v) -> Instance:
    return Instance.from_factors([F(a) for a in u], [F(b) for b in v])


@pytest.fixture
def decoy():
    # not critical although 0 lies in every partial subdifferential
    return inst([2, -1], [1, F(1, 2)]), pt([1, -1], [1, 1])


@pytest.fixture
def balanced():
    return (
        inst([-2, -1, 2, 1, -2], [-1, 1, 1]),
        pt([2, -1, -1, 1, -1], [-1, F(-1, 2), F(-1, 2)]),
    )


@pytest.fixture
def col01():
    return inst([0, 1], [1])


@pytest.fixture
def fixtures_dir():
    return FIXTURES
