import pytest

from sq3 import binary_groups as bg
from sq3.quaternion import EXACT, FLOAT, Quaternion, UnsupportedExact, qmul

ORDERS = [("C", 1, 1), ("C", 2, 2), ("C", 4, 4), ("C", 8, 8), ("D", 1, 4), ("D", 2, 8), ("D", 4, 16),
          ("T", None, 24), ("O", None, 48), ("I", None, 120), ("Idagger", None, 120)]


@pytest.mark.parametrize("label,n,order", ORDERS)
def test_orders_and_axioms(label, n, order):
    g = bg.build(label, n, EXACT)
    assert len(g) == order
    assert g.check_axioms()
    for q in g.elements:
        assert q.norm2() == 1


@pytest.mark.parametrize("n", [3, 5, 6, 7])
def test_float_only_orders(n):
    assert len(bg.build("C", n, FLOAT)) == n
    assert len(bg.build("D", n, FLOAT)) == 4 * n
    with pytest.raises(UnsupportedExact):
        bg.build("C", n, EXACT) if n != 6 else bg.build("D", 3, EXACT)


def test_icosahedral_pair():
    T, I, Id = bg.build("T"), bg.build("I"), bg.build("Idagger")
    assert I.keys() & Id.keys() == T.keys()
    # I-dagger is the image of I under sqrt5 -> -sqrt5
    assert {bg.sqrt5_flip(q).key(EXACT) for q in I.elements} == Id.keys()


def test_chain_and_normality():
    C2, D2, T, O = bg.build("C", 2), bg.build("D", 2), bg.build("T"), bg.build("O")
    assert C2.issubset(D2) and D2.issubset(T) and T.issubset(O)
    assert bg.normal_in(D2, T)
    assert bg.normal_in(T, O)
    assert bg.normal_in(C2, O)
    C4 = bg.build("C", 4)
    assert C4.issubset(T) and not bg.normal_in(C4, T)


def test_cosets_partition():
    O, T = bg.build("O"), bg.build("T")
    cs = bg.cosets(O, T)
    assert len(cs) == 2
    seen = [q.key(EXACT) for c in cs for q in c]
    assert len(seen) == len(set(seen)) == 48
    labels = bg.coset_labels(O, T)
    assert len(set(labels.values())) == 2


def test_coset_representatives_generate_I():
    reps = bg.I_COSET_REPS(EXACT)
    T, I = bg.build("T"), bg.build("I")
    keys = {qmul(r, t).key(EXACT) for r in reps for t in T.elements}
    assert keys == I.keys()


def test_minus_one_central():
    I = bg.build("I")
    minus = -Quaternion.one(EXACT)
    assert I.lookup(minus) is not None
