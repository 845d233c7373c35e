from fractions import Fraction as F

from hypothesis import strategies as st

from rank1_landscape.core import Instance, Point

POOL = [F(a) for a in (-2, -1, 0, 1, 2)] + [F(-1, 2), F(1, 2)]
vals = st.sampled_from(POOL)


@st.composite
def instances(draw, max_dim=4):
    m = draw(st.integers(1, max_dim))
    n = draw(st.integers(1, max_dim))
    u = [draw(vals) for _ in range(m)]
    v = [draw(vals) for _ in range(n)]
    return Instance.from_factors(u, v)


@st.composite
def points_for(draw, inst):
    x = [draw(vals) for _ in range(inst.m)]
    y = [draw(vals) for _ in range(inst.n)]
    family = draw(st.integers(0, 4))
    theta = draw(st.sampled_from([F(1), F(-2), F(1, 2)]))
    if family == 1:  # scaled global minimum
        x = [a * theta for a in inst.u]
        y = [b / theta for b in inst.v]
    elif family == 2:
        y = [F(0)] * inst.n
    elif family == 3:
        x = [F(0)] * inst.m
    return Point(x, y)


@st.composite
def instance_points(draw, max_dim=4):
    inst = draw(instances(max_dim))
    return inst, draw(points_for(inst))
