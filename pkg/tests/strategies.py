"""Hypothesis strategies for types and terms over the two-point lattice."""

from __future__ import annotations

from hypothesis import strategies as st

from dcc.lattice import make_indices
from dcc.syntax import (
    UNIT,
    UNITV,
    Abs,
    App,
    Bind,
    Case,
    Fun,
    Inj,
    Open,
    Pair,
    Prod,
    Proj,
    Strong,
    StrongRet,
    Sum,
    Taint,
    Var,
    Weak,
    WeakRet,
    Weaken,
)

TWO = make_indices("two")
INDICES = st.sampled_from(TWO.indices())
LEVELS = st.sampled_from(TWO.levels())


def types(indices=INDICES):
    return st.recursive(
        st.just(UNIT),
        lambda t: st.one_of(
            st.builds(Prod, t, t),
            st.builds(Sum, t, t),
            st.builds(Fun, t, t),
            st.builds(Strong, indices, t),
            st.builds(Weak, indices, t),
            st.builds(Open, t, indices),
        ),
        max_leaves=6,
    )


NAMES = st.sampled_from(["x", "y", "z"])


def terms(with_taint: bool = True):
    def extend(e):
        options = [
            st.builds(Abs, NAMES, types(), e),
            st.builds(App, e, e),
            st.builds(Pair, e, e),
            st.builds(Proj, st.sampled_from([1, 2]), e),
            st.builds(Inj, st.sampled_from([1, 2]), e),
            st.builds(Case, e, NAMES, e, e),
            st.builds(StrongRet, INDICES, e),
            st.builds(WeakRet, INDICES, e),
            st.builds(Bind, NAMES, e, e),
            st.builds(Weaken, e),
        ]
        if with_taint:
            options.append(st.builds(Taint, e, INDICES))
        return st.one_of(options)

    return st.recursive(st.one_of(st.just(UNITV), st.builds(Var, NAMES)), extend, max_leaves=8)
