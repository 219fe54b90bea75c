"""Finite security lattices and the level/blame index domain.

A :class:`Lattice` is given extensionally (elements plus order pairs) and
carries precomputed join and meet tables.  :class:`IndexLattice` pairs a
level lattice with an isomorphic copy of blames and compares indices in the
product lattice ``levels x blames``.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable


class LatticeError(Exception):
    pass


class NotALattice(LatticeError):
    pass


class CycleInOrder(LatticeError):
    pass


class DuplicateElement(LatticeError):
    pass


class UnknownElement(LatticeError):
    pass


@dataclass(frozen=True)
class Lattice:
    elements: tuple[str, ...]
    leq_pairs: frozenset[tuple[str, str]]
    bottom: str
    top: str
    join_table: dict[tuple[str, str], str] = field(compare=False, repr=False)
    meet_table: dict[tuple[str, str], str] = field(compare=False, repr=False)
    name: str = field(default="", compare=False)

    @classmethod
    def from_order(
        cls, elements: Iterable[str], pairs: Iterable[tuple[str, str]], name: str = ""
    ) -> Lattice:
        elems: list[str] = []
        for e in elements:
            if e in elems:
                raise DuplicateElement(e)
            elems.append(e)
        if not elems:
            raise NotALattice("empty element set")
        known = set(elems)
        rel = {(e, e) for e in elems}
        for a, b in pairs:
            for x in (a, b):
                if x not in known:
                    raise UnknownElement(x)
            rel.add((a, b))
        # transitive closure (Warshall)
        for k in elems:
            for i in elems:
                if (i, k) not in rel:
                    continue
                for j in elems:
                    if (k, j) in rel:
                        rel.add((i, j))
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise CycleInOrder(f"{a} and {b} are mutually ordered")

        def lub(a: str, b: str) -> str:
            ups = [c for c in elems if (a, c) in rel and (b, c) in rel]
            least = [c for c in ups if all((c, d) in rel for d in ups)]
            if len(least) != 1:
                raise NotALattice(f"{a} and {b} have no least upper bound")
            return least[0]

        def glb(a: str, b: str) -> str:
            downs = [c for c in elems if (c, a) in rel and (c, b) in rel]
            greatest = [c for c in downs if all((d, c) in rel for d in downs)]
            if len(greatest) != 1:
                raise NotALattice(f"{a} and {b} have no greatest lower bound")
            return greatest[0]

        join = {(a, b): lub(a, b) for a in elems for b in elems}
        meet = {(a, b): glb(a, b) for a in elems for b in elems}
        bottom = [e for e in elems if all((e, x) in rel for x in elems)]
        top = [e for e in elems if all((x, e) in rel for x in elems)]
        if len(bottom) != 1 or len(top) != 1:
            raise NotALattice("no bottom or no top")
        return cls(tuple(elems), frozenset(rel), bottom[0], top[0], join, meet, name)

    def leq(self, a: str, b: str) -> bool:
        if a not in self.elements or b not in self.elements:
            raise UnknownElement(a if a not in self.elements else b)
        return (a, b) in self.leq_pairs

    def join(self, a: str, b: str) -> str:
        try:
            return self.join_table[a, b]
        except KeyError:
            raise UnknownElement(a if a not in self.elements else b) from None

    def meet(self, a: str, b: str) -> str:
        try:
            return self.meet_table[a, b]
        except KeyError:
            raise UnknownElement(a if a not in self.elements else b) from None

    def __contains__(self, x: object) -> bool:
        return x in self.elements


BUILTIN = {
    "two": (("L", "H"), [("L", "H")]),
    "diamond": (
        ("Bot", "L", "R", "Top"),
        [("Bot", "L"), ("Bot", "R"), ("L", "Top"), ("R", "Top")],
    ),
    "three": (("L", "M", "H"), [("L", "M"), ("M", "H")]),
}


def parse_lattice(text: str, name: str = "") -> Lattice:
    """Parse the line-oriented format: ``elements a b c`` and ``leq a b``."""
    elements: list[str] = []
    pairs: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "elements":
            elements.extend(rest)
        elif head == "leq" and len(rest) == 2:
            pairs.append((rest[0], rest[1]))
        else:
            raise LatticeError(f"line {lineno}: cannot parse {raw!r}")
    return Lattice.from_order(elements, pairs, name)


def load_lattice(source: str) -> Lattice:
    """A built-in name, a path to a lattice file, or the file text itself."""
    if source in BUILTIN:
        elems, pairs = BUILTIN[source]
        return Lattice.from_order(elems, pairs, source)
    path = Path(source)
    if "\n" not in source and path.exists():
        return parse_lattice(path.read_text(encoding="utf-8"), path.stem)
    if "\n" in source or source.lstrip().startswith("elements"):
        return parse_lattice(source)
    raise LatticeError(f"unknown lattice {source!r}")


class BlameMode(enum.Enum):
    PRESERVE = "preserve"
    FLIP = "flip"


@dataclass(frozen=True, order=True)
class Index:
    """A point of the product lattice: level component and blame component.

    The blame component is stored as the level ``b`` whose image ``beta(b)``
    it denotes.
    """

    level: str
    blame: str


class IndexLattice:
    """Levels plus blames, compared in the product lattice."""

    def __init__(self, lattice: Lattice, mode: BlameMode = BlameMode.PRESERVE):
        self.lattice = lattice
        self.mode = mode
        L = lattice
        self.blame_bottom = L.bottom if mode is BlameMode.PRESERVE else L.top
        self.blame_top = L.top if mode is BlameMode.PRESERVE else L.bottom
        self.bottom = Index(L.bottom, self.blame_bottom)
        self.top = Index(L.top, self.blame_top)
        self._levels = {x: Index(x, self.blame_bottom) for x in L.elements}
        self._blames = {x: Index(L.bottom, x) for x in L.elements}

    def __repr__(self) -> str:
        return f"IndexLattice({self.lattice.name or self.lattice.elements!r}, {self.mode.value})"

    # blame-component order
    def blame_leq(self, a: str, b: str) -> bool:
        if self.mode is BlameMode.PRESERVE:
            return self.lattice.leq(a, b)
        return self.lattice.leq(b, a)

    def blame_join(self, a: str, b: str) -> str:
        if self.mode is BlameMode.PRESERVE:
            return self.lattice.join(a, b)
        return self.lattice.meet(a, b)

    def blame_meet(self, a: str, b: str) -> str:
        if self.mode is BlameMode.PRESERVE:
            return self.lattice.meet(a, b)
        return self.lattice.join(a, b)

    def level(self, name: str) -> Index:
        try:
            return self._levels[name]
        except KeyError:
            raise UnknownElement(name) from None

    def beta(self, name: str | Index) -> Index:
        if isinstance(name, Index):
            if not self.is_level(name):
                raise UnknownElement(f"beta is only defined on levels, got {self.show(name)}")
            name = name.level
        try:
            return self._blames[name]
        except KeyError:
            raise UnknownElement(name) from None

    def beta_inv(self, b: Index) -> Index:
        if b.level != self.lattice.bottom:
            raise UnknownElement(f"{self.show(b)} is not a blame")
        return self.level(b.blame)

    def is_level(self, i: Index) -> bool:
        return i.blame == self.blame_bottom

    def is_blame(self, i: Index) -> bool:
        return i.level == self.lattice.bottom and i.blame != self.blame_bottom

    def _check(self, i: Index) -> None:
        if i.level not in self.lattice or i.blame not in self.lattice:
            raise UnknownElement(repr(i))

    def leq(self, a: Index, b: Index) -> bool:
        self._check(a)
        self._check(b)
        return self.lattice.leq(a.level, b.level) and self.blame_leq(a.blame, b.blame)

    def join(self, a: Index, b: Index) -> Index:
        self._check(a)
        self._check(b)
        return Index(self.lattice.join(a.level, b.level), self.blame_join(a.blame, b.blame))

    def meet(self, a: Index, b: Index) -> Index:
        self._check(a)
        self._check(b)
        return Index(self.lattice.meet(a.level, b.level), self.blame_meet(a.blame, b.blame))

    def join_all(self, xs: Iterable[Index]) -> Index:
        out = self.bottom
        for x in xs:
            out = self.join(out, x)
        return out

    def levels(self) -> list[Index]:
        return [self._levels[x] for x in self.lattice.elements]

    def blames(self) -> list[Index]:
        return [self._blames[x] for x in self.lattice.elements]

    def indices(self) -> list[Index]:
        return [Index(a, b) for a, b in itertools.product(self.lattice.elements, repeat=2)]

    def parse(self, text: str) -> Index:
        """``H``, ``!H`` or the mixed form ``H,!L``."""
        out = self.bottom
        for part in text.split(","):
            part = part.strip()
            if part.startswith("!"):
                out = self.join(out, self.beta(part[1:]))
            else:
                out = self.join(out, self.level(part))
        return out

    def show(self, i: Index) -> str:
        if self.is_level(i):
            return i.level
        if i.level == self.lattice.bottom:
            return "!" + i.blame
        return f"{i.level},!{i.blame}"


def make_indices(lattice: str | Lattice = "two", mode: BlameMode | str = BlameMode.PRESERVE) -> IndexLattice:
    if isinstance(lattice, str):
        lattice = load_lattice(lattice)
    if isinstance(mode, str):
        mode = BlameMode(mode)
    return IndexLattice(lattice, mode)
