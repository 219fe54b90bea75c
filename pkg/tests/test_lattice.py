from __future__ import annotations

import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dcc.lattice import (
    BUILTIN,
    CycleInOrder,
    Lattice,
    LatticeError,
    NotALattice,
    UnknownElement,
    load_lattice,
    make_indices,
    parse_lattice,
)

INDEX_LATTICES = [make_indices(name, mode) for name in BUILTIN for mode in ("preserve", "flip")]


def test_two_point_chain():
    two = load_lattice("two")
    assert two.leq("L", "H") and not two.leq("H", "L")
    assert (two.bottom, two.top) == ("L", "H")


def test_diamond_join_and_meet():
    d = load_lattice("diamond")
    assert d.join("L", "R") == d.top == "Top"
    assert d.meet("L", "R") == d.bottom == "Bot"


def test_incomparable_pair_without_top_is_rejected():
    with pytest.raises(NotALattice):
        parse_lattice("elements a b\n")


def test_cycles_and_unknown_elements():
    with pytest.raises(CycleInOrder):
        Lattice.from_order("ab", [("a", "b"), ("b", "a")])
    with pytest.raises(UnknownElement):
        Lattice.from_order("ab", [("a", "c")])


def test_lattice_file(tmp_path):
    p = tmp_path / "chain.lat"
    p.write_text("# a three-point chain\nelements lo mid hi\nleq lo mid\nleq mid hi\n")
    lat = load_lattice(str(p))
    assert lat.leq("lo", "hi")
    assert lat.join("lo", "mid") == "mid"
    with pytest.raises(LatticeError):
        load_lattice("no-such-lattice")


def test_blame_order_follows_mode():
    pres, flip = make_indices("two", "preserve"), make_indices("two", "flip")
    assert pres.leq(pres.beta("L"), pres.beta("H"))
    assert flip.leq(flip.beta("H"), flip.beta("L"))
    assert not flip.leq(flip.beta("L"), flip.beta("H"))


def test_beta_naming_and_inverse():
    lat = make_indices("two")
    assert lat.show(lat.beta("H")) == "!H"
    assert lat.beta_inv(lat.beta("L")) == lat.level("L")
    assert lat.parse("H,!L") == lat.join(lat.level("H"), lat.beta("L"))
    assert lat.show(lat.parse("H,!H")) == "H,!H"


@pytest.mark.parametrize("lat", INDEX_LATTICES, ids=repr)
def test_beta_is_a_homomorphism(lat):
    L = lat.lattice
    for a, b in itertools.product(L.elements, repeat=2):
        joined = lat.beta(L.join(a, b))
        if lat.mode.value == "preserve":
            assert joined == lat.join(lat.beta(a), lat.beta(b))
        else:
            assert joined == lat.meet(lat.beta(a), lat.beta(b))


@st.composite
def index_triples(draw):
    lat = draw(st.sampled_from(INDEX_LATTICES))
    idx = st.sampled_from(lat.indices())
    return lat, draw(idx), draw(idx), draw(idx)


@given(index_triples())
def test_product_order_is_a_lattice(case):
    lat, a, b, c = case
    assert lat.leq(a, a)
    if lat.leq(a, b) and lat.leq(b, a):
        assert a == b
    if lat.leq(a, b) and lat.leq(b, c):
        assert lat.leq(a, c)
    j, m = lat.join(a, b), lat.meet(a, b)
    assert lat.leq(a, j) and lat.leq(b, j) and lat.leq(m, a) and lat.leq(m, b)
    # least and greatest
    if lat.leq(a, c) and lat.leq(b, c):
        assert lat.leq(j, c)
    if lat.leq(c, a) and lat.leq(c, b):
        assert lat.leq(c, m)
    assert lat.leq(lat.bottom, a) and lat.leq(a, lat.top)


@given(st.sampled_from(list(BUILTIN)), st.data())
def test_tables_agree_with_brute_force(name, data):
    L = load_lattice(name)
    a, b = data.draw(st.sampled_from(L.elements)), data.draw(st.sampled_from(L.elements))
    ups = [c for c in L.elements if L.leq(a, c) and L.leq(b, c)]
    downs = [c for c in L.elements if L.leq(c, a) and L.leq(c, b)]
    assert L.join(a, b) in ups and L.meet(a, b) in downs
    assert all(L.leq(L.join(a, b), c) for c in ups)
    assert all(L.leq(c, L.meet(a, b)) for c in downs)
