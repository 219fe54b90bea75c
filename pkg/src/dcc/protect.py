"""Protection predicates over normalized types.

``protected_at(l, t)``: terms of type ``t`` leak nothing at ``l``, counting
implicit flows.  ``weakly_protected_at(l, t)``: the explicit-flow analogue,
under which sums are protected and open types never are.
"""

from __future__ import annotations

from dcc.lattice import Index, IndexLattice
from dcc.syntax import Fun, Meta, Open, Prod, Strong, Sum, Type, UnitT, Weak


def protected_at(l: Index, t: Type, lat: IndexLattice) -> bool:
    if isinstance(t, UnitT):
        return True
    if isinstance(t, Prod):
        return protected_at(l, t.left, lat) and protected_at(l, t.right, lat)
    if isinstance(t, Fun):
        return protected_at(l, t.cod, lat)
    if isinstance(t, Strong):
        return lat.leq(l, t.index) or protected_at(l, t.body, lat)
    if isinstance(t, Weak):
        return protected_at(l, t.body, lat)
    if isinstance(t, (Sum, Open)):
        return False
    if isinstance(t, Meta):
        raise ValueError("protection of an unresolved type variable")
    raise TypeError(f"not a type: {t!r}")


def weakly_protected_at(l: Index, t: Type, lat: IndexLattice) -> bool:
    if isinstance(t, UnitT):
        return True
    if isinstance(t, (Prod, Sum)):
        return weakly_protected_at(l, t.left, lat) and weakly_protected_at(l, t.right, lat)
    if isinstance(t, Fun):
        return weakly_protected_at(l, t.cod, lat)
    if isinstance(t, (Weak, Strong)):
        return lat.leq(l, t.index) or weakly_protected_at(l, t.body, lat)
    if isinstance(t, Open):
        return False
    if isinstance(t, Meta):
        raise ValueError("protection of an unresolved type variable")
    raise TypeError(f"not a type: {t!r}")
