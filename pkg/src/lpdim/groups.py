"""Concrete amenable groups and their Folner windows.

A group is a finite product of axes, each either an infinite cyclic axis
(the integers) or a finite cyclic axis of some order n.  Elements are
integer coordinate tuples with one slot per axis; cyclic slots are always
stored reduced mod n.  The canonical order on elements and finite subsets
is lexicographic on coordinates, which is what every greedy scan in the
tiling module relies on for determinism.
"""

from __future__ import annotations

import itertools
import operator
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

from .errors import StructureError

Coords = tuple[int, ...]


@dataclass(frozen=True)
class GroupSpec:
    """A product of integer-lattice axes (modulus 0) and cyclic axes (modulus n >= 1)."""

    moduli: tuple[int, ...]

    def __post_init__(self):
        if not isinstance(self.moduli, tuple) or not self.moduli:
            raise ValueError("a group needs at least one axis")
        for m in self.moduli:
            if not isinstance(m, int) or m < 0:
                raise ValueError(f"axis moduli must be integers >= 0, got {self.moduli!r}")

    @staticmethod
    def integer_lattice(rank: int) -> "GroupSpec":
        if rank < 1:
            raise ValueError(f"lattice rank must be >= 1, got {rank}")
        return GroupSpec((0,) * rank)

    @staticmethod
    def cyclic(order: int) -> "GroupSpec":
        if order < 1:
            raise ValueError(f"cyclic order must be >= 1, got {order}")
        return GroupSpec((order,))

    @staticmethod
    def product(factors: Iterable["GroupSpec"]) -> "GroupSpec":
        factors = list(factors)
        if len(factors) < 2:
            raise ValueError("a direct product needs at least 2 factors")
        return GroupSpec(tuple(m for f in factors for m in f.moduli))

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def is_finite(self) -> bool:
        return all(m > 0 for m in self.moduli)

    def reduce(self, coords: Iterable[int]) -> Coords:
        out = tuple(int(c) % m if m else int(c) for c, m in zip(coords, self.moduli))
        return out

    def check_coords(self, coords) -> Coords:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self.rank:
            raise StructureError(
                f"coordinate arity {len(coords)} does not match group rank {self.rank}"
            )
        return self.reduce(coords)

    def element(self, *coords) -> "GroupElement":
        if len(coords) == 1 and isinstance(coords[0], (tuple, list)):
            coords = tuple(coords[0])
        return GroupElement(self, self.check_coords(coords))

    def identity(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.rank)

    def describe(self) -> str:
        parts = []
        run = 0
        for m in self.moduli + (None,):
            if m == 0:
                run += 1
                continue
            if run:
                parts.append("Z" if run == 1 else f"Z^{run}")
                run = 0
            if m is not None:
                parts.append(f"Z/{m}")
        return " x ".join(parts) if parts else "Z"

    def __repr__(self):
        return f"GroupSpec({self.describe()!r})"


@dataclass(frozen=True)
class GroupElement:
    group: GroupSpec
    coords: Coords

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def inverse(self) -> "GroupElement":
        return invert(self)

    def __repr__(self):
        return f"g{self.coords}"


def compose(a: GroupElement, b: GroupElement) -> GroupElement:
    """Group law, coordinatewise addition with cyclic slots reduced."""
    if a.group != b.group:
        raise StructureError("cannot compose elements of different groups")
    g = a.group
    return GroupElement(g, g.reduce(x + y for x, y in zip(a.coords, b.coords)))


def invert(a: GroupElement) -> GroupElement:
    g = a.group
    return GroupElement(g, g.reduce(-x for x in a.coords))


def compose_coords(group: GroupSpec, a: Coords, b: Coords) -> Coords:
    return group.reduce(x + y for x, y in zip(a, b))


def invert_coords(group: GroupSpec, a: Coords) -> Coords:
    return group.reduce(-x for x in a)


@dataclass(frozen=True)
class FiniteSubset:
    """A finite set of group elements, stored as sorted coordinate tuples."""

    group: GroupSpec
    elements: tuple[Coords, ...]

    @staticmethod
    def of(group: GroupSpec, items) -> "FiniteSubset":
        coords = set()
        for item in items:
            if isinstance(item, GroupElement):
                if item.group != group:
                    raise StructureError("element belongs to a different group")
                coords.add(item.coords)
            elif isinstance(item, (tuple, list)):
                coords.add(group.check_coords(item))
            elif group.rank == 1:
                try:
                    coords.add(group.reduce((operator.index(item),)))
                except TypeError:
                    raise StructureError(f"cannot interpret {item!r} as an element")
            else:
                raise StructureError(f"cannot interpret {item!r} as an element")
        return FiniteSubset(group, tuple(sorted(coords)))

    @cached_property
    def coord_set(self) -> frozenset:
        return frozenset(self.elements)

    @cached_property
    def positions(self) -> dict:
        """coords -> index in canonical order."""
        return {c: i for i, c in enumerate(self.elements)}

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Coords]:
        return iter(self.elements)

    def __contains__(self, coords) -> bool:
        if isinstance(coords, GroupElement):
            coords = coords.coords
        return tuple(coords) in self.coord_set

    def is_empty(self) -> bool:
        return not self.elements

    def translated(self, g: GroupElement) -> "FiniteSubset":
        return translate_set(g, self)

    def union(self, other: "FiniteSubset") -> "FiniteSubset":
        self._check_peer(other)
        return FiniteSubset(self.group, tuple(sorted(self.coord_set | other.coord_set)))

    def difference(self, other: "FiniteSubset") -> "FiniteSubset":
        self._check_peer(other)
        return FiniteSubset(self.group, tuple(sorted(self.coord_set - other.coord_set)))

    def intersection(self, other: "FiniteSubset") -> "FiniteSubset":
        self._check_peer(other)
        return FiniteSubset(self.group, tuple(sorted(self.coord_set & other.coord_set)))

    def is_subset_of(self, other: "FiniteSubset") -> bool:
        self._check_peer(other)
        return self.coord_set <= other.coord_set

    def _check_peer(self, other: "FiniteSubset"):
        if self.group != other.group:
            raise StructureError("sets live over different groups")

    def __repr__(self):
        inner = ", ".join(map(str, self.elements[:6]))
        if len(self.elements) > 6:
            inner += f", ... ({len(self.elements)} total)"
        return f"FiniteSubset{{{inner}}}"


def translate_set(g: GroupElement, subset: FiniteSubset) -> FiniteSubset:
    """Left translate g * S, re-sorted into canonical order."""
    if g.group != subset.group:
        raise StructureError("translate by an element of a different group")
    grp = subset.group
    moved = (compose_coords(grp, g.coords, c) for c in subset.elements)
    return FiniteSubset(grp, tuple(sorted(moved)))


def folner_window(group: GroupSpec, index: int) -> FiniteSubset:
    """The index-th window of the standard Folner ladder.

    Infinite axes contribute the box [0, index); finite cyclic axes are
    exhausted immediately and contribute the whole axis at every index.
    """
    if index < 1:
        raise ValueError(f"window index must be >= 1, got {index}")
    axes = [range(index) if m == 0 else range(m) for m in group.moduli]
    elements = tuple(itertools.product(*axes))
    return FiniteSubset(group, elements)


_FACTOR_RE = re.compile(r"^Z(?:\^(\d+)|/(\d+))?$", re.IGNORECASE)


def parse_group(text: str) -> GroupSpec:
    """Parse strings like 'Z', 'Z^2', 'Z/5', 'Z x Z/3' (whitespace-insensitive)."""
    compact = re.sub(r"\s+", "", text).replace("×", "x")
    if not compact:
        raise ValueError("empty group description")
    factors = []
    for part in re.split(r"[xX]", compact):
        m = _FACTOR_RE.match(part)
        if not m:
            raise ValueError(f"cannot parse group factor {part!r} in {text!r}")
        if m.group(1) is not None:
            factors.append(GroupSpec.integer_lattice(int(m.group(1))))
        elif m.group(2) is not None:
            factors.append(GroupSpec.cyclic(int(m.group(2))))
        else:
            factors.append(GroupSpec.integer_lattice(1))
    if len(factors) == 1:
        return factors[0]
    return GroupSpec.product(factors)
