import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smbalg import AlgebraError, Partition, all_partitions, join_partitions, meet_partitions


def test_canonical_form():
    p = Partition(4, (7, 7, 3, 7))
    assert p.class_ids == (0, 0, 1, 0)
    assert str(p) == "0 1 3 | 2"


def test_parse_and_format():
    p = Partition.parse("0 1 | 2", 3)
    assert p.class_ids == (0, 0, 1)
    assert str(p) == "0 1 | 2"
    assert Partition.parse(str(p), 3) == p
    with pytest.raises(AlgebraError, match="missing"):
        Partition.parse("0 1", 3)
    with pytest.raises(AlgebraError, match="twice"):
        Partition.parse("0 1 | 1 2", 3)
    with pytest.raises(AlgebraError, match="out of range"):
        Partition.parse("0 1 | 3", 3)


def test_zero_one_blocks():
    assert Partition.zero(3).blocks() == [(0,), (1,), (2,)]
    assert Partition.one(3).blocks() == [(0, 1, 2)]
    assert Partition.from_blocks(3, [[2], [0, 1]]) == Partition(3, (0, 0, 1))


def test_join_meet_examples():
    p = Partition.parse("0 1 | 2", 3)
    q = Partition.parse("0 | 1 2", 3)
    assert p.join(q).is_one
    assert p.join(Partition.zero(3)) == p
    assert p.meet(q) == Partition.zero(3)
    with pytest.raises(AlgebraError, match="mismatch"):
        p.join(Partition.zero(4))


def test_refines():
    p = Partition(4, (0, 0, 1, 2))
    q = Partition(4, (0, 0, 1, 1))
    assert p.refines(q) and not q.refines(p)
    assert p <= q and p < q


partitions_3 = st.lists(st.integers(0, 2), min_size=3, max_size=3).map(
    lambda ids: Partition(3, tuple(ids)))
partitions_5 = st.lists(st.integers(0, 4), min_size=5, max_size=5).map(
    lambda ids: Partition(5, tuple(ids)))


@settings(max_examples=200, deadline=None)
@given(partitions_5, partitions_5, partitions_5)
def test_lattice_laws(p, q, r):
    assert join_partitions(p, q) == join_partitions(q, p)
    assert meet_partitions(p, q) == meet_partitions(q, p)
    assert p.join(p) == p and p.meet(p) == p
    assert p.meet(q).refines(p) and p.refines(p.join(q))
    assert p.join(q.join(r)) == p.join(q).join(r)
    assert p.meet(q.meet(r)) == p.meet(q).meet(r)
    # absorption
    assert p.join(p.meet(q)) == p
    assert p.meet(p.join(q)) == p


@settings(max_examples=100, deadline=None)
@given(partitions_3)
def test_parse_round_trip(p):
    assert Partition.parse(str(p), 3) == p


def test_all_partitions_counts():
    # Bell numbers
    assert len(list(all_partitions(1))) == 1
    assert len(list(all_partitions(3))) == 5
    assert len(list(all_partitions(5))) == 52
    seen = set(all_partitions(4))
    assert len(seen) == 15
