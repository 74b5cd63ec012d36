"""Finite neighborhood frames over bitmask-coded ground sets.

A ground set of size n is the points 0..n-1.  A subset is an int in
[0, 2^n) whose bit i records membership of point i.  A family of subsets
is kept as a strictly increasing tuple of such masks; for n <= 5 a family
also packs into a single "famask" int whose bit a records membership of
the subset-mask a.  Frames, algebras, relations and morphisms are frozen
dataclasses, so every value in the package is immutable and safe to share
across worker processes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable

PLAIN_OP_CAP = 16
ENUM_FILTER_CAP = 4
ENUM_BACKTRACK_CAP = 5
CANONICAL_CAP = 8
EXHAUSTIVE_FRAMES_CAP = 3
SEARCH_MAX_N_CAP = 4


class NbhdError(Exception):
    """Base class for package errors."""


class InvalidInputError(NbhdError, ValueError):
    """Malformed value: width mismatch, bad JSON shape, broken invariant."""


class CapExceededError(NbhdError):
    """A size cap or work guard was exceeded."""


def effective_cap(default: int) -> int:
    """Apply the NBHD_MAX_N environment override, which only lowers caps."""
    raw = os.environ.get("NBHD_MAX_N")
    if raw is None:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInputError(f"NBHD_MAX_N must be an integer, got {raw!r}")
    if value < 0:
        raise InvalidInputError("NBHD_MAX_N must be nonnegative")
    return min(default, value)


def check_width(n: int, cap: int, what: str) -> None:
    if not isinstance(n, int) or n < 0:
        raise InvalidInputError(f"{what}: ground set size must be a nonnegative int")
    limit = effective_cap(cap)
    if n > limit:
        raise CapExceededError(f"{what}: n={n} exceeds cap {limit}")


def full_mask(n: int) -> int:
    return (1 << n) - 1


def check_subset(a: int, n: int, what: str = "subset") -> None:
    if not isinstance(a, int) or a < 0 or a > full_mask(n):
        raise InvalidInputError(f"{what}: {a!r} is not a subset mask for n={n}")


@dataclass(frozen=True)
class Family:
    """A set of subset masks, stored strictly increasing."""

    members: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        prev = -1
        for m in self.members:
            if not isinstance(m, int) or m <= prev:
                raise InvalidInputError(f"family members must be strictly increasing ints, got {self.members!r}")
            prev = m

    @staticmethod
    def of(masks: Iterable[int]) -> "Family":
        return Family(tuple(sorted(set(masks))))

    def __contains__(self, mask: int) -> bool:
        return mask in self.members

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def famask(self) -> int:
        out = 0
        for m in self.members:
            out |= 1 << m
        return out


def family_from_famask(famask: int) -> Family:
    members = []
    a = 0
    f = famask
    while f:
        if f & 1:
            members.append(a)
        f >>= 1
        a += 1
    return Family(tuple(members))


def check_family(fam: Family, n: int, what: str = "family") -> None:
    if fam.members and fam.members[-1] > full_mask(n):
        raise InvalidInputError(f"{what}: member {fam.members[-1]} is not a subset mask for n={n}")


@dataclass(frozen=True)
class NeighborhoodFrame:
    """(X, N) with N assigning an arbitrary family of subsets to each point."""

    n: int
    nbhd: tuple[Family, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidInputError("frame: n must be nonnegative")
        if len(self.nbhd) != self.n:
            raise InvalidInputError(f"frame: expected {self.n} neighborhood families, got {len(self.nbhd)}")
        for x, fam in enumerate(self.nbhd):
            check_family(fam, self.n, f"frame: N({x})")

    def key(self) -> tuple[int, ...]:
        """Total-order key: per-point famasks, compared left to right."""
        return tuple(fam.famask() for fam in self.nbhd)


@dataclass(frozen=True)
class NeighborhoodAlgebra:
    """Powerset algebra over n atoms with an arbitrary unary box table."""

    n: int
    box: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise InvalidInputError("algebra: n must be nonnegative")
        if len(self.box) != 1 << self.n:
            raise InvalidInputError(f"algebra: box table must have {1 << self.n} entries, got {len(self.box)}")
        for a, value in enumerate(self.box):
            check_subset(value, self.n, f"algebra: box[{a}]")


@dataclass(frozen=True)
class Relation:
    """Kripke relation given by successor masks."""

    n: int
    succ: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.succ) != self.n:
            raise InvalidInputError(f"relation: expected {self.n} successor masks, got {len(self.succ)}")
        for x, s in enumerate(self.succ):
            check_subset(s, self.n, f"relation: R[{x}]")


@dataclass(frozen=True)
class FrameMorphism:
    """Point map between ground sets, stored as an image table."""

    n_dom: int
    n_cod: int
    map: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_dom < 0 or self.n_cod < 0:
            raise InvalidInputError("morphism: sizes must be nonnegative")
        if len(self.map) != self.n_dom:
            raise InvalidInputError(f"morphism: expected {self.n_dom} entries, got {len(self.map)}")
        for x, y in enumerate(self.map):
            if not isinstance(y, int) or not 0 <= y < self.n_cod:
                raise InvalidInputError(f"morphism: map[{x}]={y!r} is not a point of the codomain")

    def preimage(self, a_cod: int) -> int:
        out = 0
        for x, y in enumerate(self.map):
            if a_cod >> y & 1:
                out |= 1 << x
        return out

    def image(self, a_dom: int) -> int:
        out = 0
        for x, y in enumerate(self.map):
            if a_dom >> x & 1:
                out |= 1 << y
        return out


@dataclass(frozen=True)
class CompleteHom:
    """Complete Boolean-with-box hom between powerset algebras.

    Stored by its atom map: atom_map[y] is the domain atom under the
    codomain atom y, i.e. the left adjoint restricted to atoms.  The full
    table is h(a) = { y | atom_map[y] in a }, which preserves all meets
    and joins by construction.
    """

    n_dom: int
    n_cod: int
    atom_map: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n_dom < 0 or self.n_cod < 0:
            raise InvalidInputError("hom: sizes must be nonnegative")
        if len(self.atom_map) != self.n_cod:
            raise InvalidInputError(f"hom: expected {self.n_cod} atom entries, got {len(self.atom_map)}")
        for y, x in enumerate(self.atom_map):
            if not isinstance(x, int) or not 0 <= x < self.n_dom:
                raise InvalidInputError(f"hom: atom_map[{y}]={x!r} is not a domain atom")

    def apply(self, a_dom: int) -> int:
        out = 0
        for y, x in enumerate(self.atom_map):
            if a_dom >> x & 1:
                out |= 1 << y
        return out


def box_n(frame: NeighborhoodFrame, a: int) -> int:
    """Points whose neighborhood family contains a."""
    check_width(frame.n, PLAIN_OP_CAP, "box_n")
    check_subset(a, frame.n, "box_n: a")
    out = 0
    for x, fam in enumerate(frame.nbhd):
        if a in fam:
            out |= 1 << x
    return out


def complement_frame(frame: NeighborhoodFrame) -> NeighborhoodFrame:
    """Swap every family for its complement within the full powerset."""
    check_width(frame.n, PLAIN_OP_CAP, "complement_frame")
    m = 1 << frame.n
    families = []
    for fam in frame.nbhd:
        present = set(fam.members)
        families.append(Family(tuple(a for a in range(m) if a not in present)))
    return NeighborhoodFrame(frame.n, tuple(families))


def up_cone(c: int, n: int) -> Family:
    """All supersets of c within the n-wide powerset."""
    check_subset(c, n, "up_cone: c")
    rest = full_mask(n) & ~c
    members = []
    t = 0
    while True:
        members.append(c | t)
        if t == rest:
            break
        t = (t - rest) & rest
    return Family.of(members)


def from_relation(rel: Relation) -> NeighborhoodFrame:
    """Kripke frame as a neighborhood frame: N(x) is the up-cone of R[x]."""
    check_width(rel.n, PLAIN_OP_CAP, "from_relation")
    return NeighborhoodFrame(rel.n, tuple(up_cone(s, rel.n) for s in rel.succ))


def to_relation(frame: NeighborhoodFrame) -> Relation:
    """Successor of x is the intersection of N(x); empty family gives X."""
    check_width(frame.n, PLAIN_OP_CAP, "to_relation")
    succ = []
    for fam in frame.nbhd:
        s = full_mask(frame.n)
        for a in fam:
            s &= a
        succ.append(s)
    return Relation(frame.n, tuple(succ))


def is_nbhd_morphism(f: FrameMorphism, dom: NeighborhoodFrame, cod: NeighborhoodFrame) -> bool:
    """Check: a' in N'(f(x)) iff preimage(a') in N(x), for every x and a'."""
    if f.n_dom != dom.n or f.n_cod != cod.n:
        raise InvalidInputError("is_nbhd_morphism: morphism and frame sizes disagree")
    check_width(max(dom.n, cod.n), PLAIN_OP_CAP, "is_nbhd_morphism")
    cod_sets = [set(fam.members) for fam in cod.nbhd]
    dom_sets = [set(fam.members) for fam in dom.nbhd]
    for x in range(dom.n):
        target = cod_sets[f.map[x]]
        source = dom_sets[x]
        for a_cod in range(1 << cod.n):
            if (a_cod in target) != (f.preimage(a_cod) in source):
                return False
    return True


# JSON codecs.  Dict shapes double as the CLI wire formats.

def _expect_keys(obj: dict, keys: tuple[str, ...], what: str) -> None:
    if not isinstance(obj, dict) or set(obj) != set(keys):
        raise InvalidInputError(f"{what}: expected keys {list(keys)}")


def _int_list(raw, what: str) -> tuple[int, ...]:
    if not isinstance(raw, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in raw):
        raise InvalidInputError(f"{what}: expected a list of ints")
    return tuple(raw)


def frame_to_json(frame: NeighborhoodFrame) -> dict:
    return {"n": frame.n, "N": [list(fam.members) for fam in frame.nbhd]}


def frame_from_json(obj: dict) -> NeighborhoodFrame:
    _expect_keys(obj, ("n", "N"), "frame")
    if not isinstance(obj["n"], int) or not isinstance(obj["N"], list):
        raise InvalidInputError("frame: n must be an int and N a list")
    families = tuple(Family.of(_int_list(raw, "frame: N entry")) for raw in obj["N"])
    return NeighborhoodFrame(obj["n"], families)


def algebra_to_json(alg: NeighborhoodAlgebra) -> dict:
    return {"n": alg.n, "box": list(alg.box)}


def algebra_from_json(obj: dict) -> NeighborhoodAlgebra:
    _expect_keys(obj, ("n", "box"), "algebra")
    if not isinstance(obj["n"], int):
        raise InvalidInputError("algebra: n must be an int")
    return NeighborhoodAlgebra(obj["n"], _int_list(obj["box"], "algebra: box"))


def relation_to_json(rel: Relation) -> dict:
    return {"n": rel.n, "R": list(rel.succ)}


def relation_from_json(obj: dict) -> Relation:
    _expect_keys(obj, ("n", "R"), "relation")
    if not isinstance(obj["n"], int):
        raise InvalidInputError("relation: n must be an int")
    return Relation(obj["n"], _int_list(obj["R"], "relation: R"))


def morphism_to_json(f: FrameMorphism) -> dict:
    return {"n_dom": f.n_dom, "n_cod": f.n_cod, "map": list(f.map)}


def morphism_from_json(obj: dict) -> FrameMorphism:
    _expect_keys(obj, ("n_dom", "n_cod", "map"), "morphism")
    if not isinstance(obj["n_dom"], int) or not isinstance(obj["n_cod"], int):
        raise InvalidInputError("morphism: sizes must be ints")
    return FrameMorphism(obj["n_dom"], obj["n_cod"], _int_list(obj["map"], "morphism: map"))


def hom_to_json(h: CompleteHom) -> dict:
    return {"n_dom": h.n_dom, "n_cod": h.n_cod, "atom_map": list(h.atom_map)}


def hom_from_json(obj: dict) -> CompleteHom:
    _expect_keys(obj, ("n_dom", "n_cod", "atom_map"), "hom")
    if not isinstance(obj["n_dom"], int) or not isinstance(obj["n_cod"], int):
        raise InvalidInputError("hom: sizes must be ints")
    return CompleteHom(obj["n_dom"], obj["n_cod"], _int_list(obj["atom_map"], "hom: atom_map"))
