import pytest
from hypothesis import given, strategies as st

from sdd.knots import KnotSequence, bernstein, from_config, open_uniform

QUAD4 = (-1.0, -1.0, -1.0, -0.5, 0.0, 0.5, 1.0, 1.0, 1.0)


def test_open_uniform_examples():
    assert open_uniform(-1, 1, 2, 4).knots == QUAD4
    assert open_uniform(0, 1, 0, 1).knots == (0.0, 1.0)
    rep = open_uniform(-1, 1, 2, 4, {2: 2})
    assert rep.knots == (-1.0, -1.0, -1.0, -0.5, 0.0, 0.0, 0.5, 1.0, 1.0, 1.0)
    assert rep.basis_count() == 7


def test_basis_count_and_mesh():
    k = KnotSequence(QUAD4, 2)
    assert k.basis_count() == 6
    assert k.mesh_size() == 0.5
    assert bernstein(-1, 1, 4).basis_count() == 5
    assert KnotSequence((0.0, 1.0), 0).mesh_size() == 1.0
    assert open_uniform(-1, 1, 1, 10).mesh_size() == pytest.approx(0.2)
    assert open_uniform(-1, 1, 1, 20).mesh_size() == pytest.approx(0.1)


def test_central_knot_is_exact_zero():
    k = open_uniform(-1, 1, 2, 20, {10: 2})
    assert k.distinct[10] == 0.0
    assert k.multiplicities[10] == 2
    assert k.basis_count() == 23


def test_distinct_view():
    k = open_uniform(-1, 1, 2, 4, {2: 3})
    assert k.distinct == (-1.0, -0.5, 0.0, 0.5, 1.0)
    assert k.multiplicities == (3, 1, 3, 1, 3)
    assert k.elements == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(a=-1, b=1, p=2, elements=4, multiplicities={2: 4}),
        dict(a=-1, b=1, p=2, elements=0),
        dict(a=1, b=1, p=2, elements=2),
        dict(a=-1, b=1, p=2, elements=4, multiplicities={4: 1}),
    ],
)
def test_open_uniform_rejects(kwargs):
    with pytest.raises(ValueError):
        open_uniform(**kwargs)


@pytest.mark.parametrize(
    "knots, p",
    [
        ((-1, -1, 0, 1, 1, 1), 2),  # start multiplicity 2 < p+1
        ((-1, -1, -1, -1, 0, 1, 1, 1), 2),  # start multiplicity 4 > p+1
        ((0, 0, 1, 0.5, 1, 1), 1),  # decreasing
        ((0, 0, 0.5, 0.5, 0.5, 1, 1), 1),  # interior multiplicity > p+1
    ],
)
def test_sequence_rejects(knots, p):
    with pytest.raises(ValueError):
        KnotSequence(knots, p)


@given(
    p=st.integers(0, 4),
    elements=st.integers(1, 9),
    data=st.data(),
)
def test_round_trip_and_dimension(p, elements, data):
    mult = {
        j: data.draw(st.integers(1, p + 1))
        for j in data.draw(st.sets(st.integers(1, max(1, elements - 1)), max_size=elements - 1))
        if j < elements
    }
    k = open_uniform(-2.0, 3.0, p, elements, mult)
    again = KnotSequence.from_distinct(k.distinct, k.multiplicities, p)
    assert again.knots == k.knots
    n = k.basis_count()
    assert n == sum(k.multiplicities[1:-1]) + p + 1
    assert n >= p + 1
    assert len(k.knots) == n + p + 1


def test_from_config():
    assert from_config({"p": 2, "elements": 4}, -1, 1).knots == QUAD4
    rep = from_config({"p": 2, "elements": 20, "repeat_center": True}, -1, 1)
    assert rep.basis_count() == 23
    assert from_config({"p": 2, "knots": list(QUAD4)}, -1, 1).knots == QUAD4
    with pytest.raises(ValueError):
        from_config({"p": 2, "knots": list(QUAD4)}, 0, 1)
    with pytest.raises(ValueError):
        from_config({"p": 2, "elements": 3, "repeat_center": True}, -1, 1)
    with pytest.raises(ValueError):
        from_config({"p": 2, "elements": 2, "weird": 1}, -1, 1)
