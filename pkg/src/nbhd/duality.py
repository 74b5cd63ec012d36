"""Dualities between finite frames and powerset algebras with a box.

The complex algebra of a frame reads the box table off the membership
relation box[a] = { x | a in N(x) }; the atom frame inverts it by
transposition, N(x) = { a | x in box[a] }.  Point maps dualize to
complete homs stored by their atom maps, and back.  The one-step space
of an axiom set is realized as the powerset algebra over the enumerated
Ax-subsets, with the generator table gen[a] = { atom index i | a is a
member of family i } standing in for the free one-step box.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bax import BaxSpace, enumerate_bax, baxspace_to_json, baxspace_from_json
from .core import (
    PLAIN_OP_CAP,
    CompleteHom,
    Family,
    FrameMorphism,
    InvalidInputError,
    NeighborhoodAlgebra,
    NeighborhoodFrame,
    box_n,
    check_width,
)
from .evaluate import assignment_space, eval_box_free, realize_axiom
from .formulas import And, Axiom, AxiomSet, Box, Formula, Not, Top, free_vars, is_one_step, render


def complex_algebra(frame: NeighborhoodFrame) -> NeighborhoodAlgebra:
    check_width(frame.n, PLAIN_OP_CAP, "complex_algebra")
    return NeighborhoodAlgebra(frame.n, tuple(box_n(frame, a) for a in range(1 << frame.n)))


def atom_frame(alg: NeighborhoodAlgebra) -> NeighborhoodFrame:
    check_width(alg.n, PLAIN_OP_CAP, "atom_frame")
    families = []
    for x in range(alg.n):
        families.append(Family(tuple(a for a in range(1 << alg.n) if alg.box[a] >> x & 1)))
    return NeighborhoodFrame(alg.n, tuple(families))


def is_complete_nbhd_hom(h: CompleteHom, dom: NeighborhoodAlgebra, cod: NeighborhoodAlgebra) -> bool:
    """Does the atom-map table commute with the two box tables?"""
    if h.n_dom != dom.n or h.n_cod != cod.n:
        raise InvalidInputError("is_complete_nbhd_hom: hom and algebra sizes disagree")
    for a in range(1 << dom.n):
        if h.apply(dom.box[a]) != cod.box[h.apply(a)]:
            return False
    return True


def dualize_frame_morphism(f: FrameMorphism) -> CompleteHom:
    """Preimage hom between the complex algebras, codomain frame first."""
    return CompleteHom(n_dom=f.n_cod, n_cod=f.n_dom, atom_map=f.map)


def dualize_complete_hom(h: CompleteHom) -> FrameMorphism:
    return FrameMorphism(n_dom=h.n_cod, n_cod=h.n_dom, map=h.atom_map)


@dataclass(frozen=True)
class LaxAlgebra:
    """Powerset algebra over the atoms of an Ax-subset space.

    gen[a] is the atom set of the generator at subset a: bit i is set when
    subset-mask a is a member of space.members[i].
    """

    space: BaxSpace
    gen: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def n_atoms(self) -> int:
        return len(self.space.members)

    def full_atoms(self) -> int:
        return (1 << self.n_atoms) - 1


def lax_algebra(n: int, axs: AxiomSet, strategy: str = "auto") -> LaxAlgebra:
    space = enumerate_bax(n, axs, strategy)
    gen = []
    for a in range(1 << n):
        bits = 0
        for i, fam in enumerate(space.members):
            if a in fam:
                bits |= 1 << i
        gen.append(bits)
    return LaxAlgebra(space, tuple(gen))


def _eval_transposed(lax: LaxAlgebra, f: Formula, env: dict[str, int]) -> int:
    """Atom-set value of a one-step formula with boxes read through gen."""
    if isinstance(f, Box):
        return lax.gen[eval_box_free(f.sub, env, lax.n)]
    if isinstance(f, Top):
        return lax.full_atoms()
    if isinstance(f, Not):
        return lax.full_atoms() ^ _eval_transposed(lax, f.sub, env)
    if isinstance(f, And):
        value = lax.full_atoms()
        for item in f.items:
            value &= _eval_transposed(lax, item, env)
        return value
    raise InvalidInputError("transposed evaluation needs a one-step formula")


def onestep_top_check(lax: LaxAlgebra, ax: Axiom) -> bool:
    """Does the axiom evaluate to the top atom set under every assignment?"""
    kind, payload = realize_axiom(ax, lax.n)
    if kind == "predicate":
        return all(payload(fam.famask(), lax.n) for fam in lax.space.members)
    f = payload
    if not is_one_step(f):
        raise InvalidInputError(f"onestep_top_check: {render(f)} is not one-step")
    names = free_vars(f)
    assignment_space(lax.n, len(names), "onestep_top_check")
    m = 1 << lax.n

    def sweep(i: int, env: dict[str, int]) -> bool:
        if i == len(names):
            return _eval_transposed(lax, f, env) == lax.full_atoms()
        for value in range(m):
            env[names[i]] = value
            if not sweep(i + 1, env):
                return False
        return True

    return sweep(0, {})


def lax_to_json(lax: LaxAlgebra) -> dict:
    obj = baxspace_to_json(lax.space)
    obj["gen"] = [[i for i in range(lax.n_atoms) if bits >> i & 1] for bits in lax.gen]
    return obj


def lax_from_json(obj: dict) -> LaxAlgebra:
    if not isinstance(obj, dict) or set(obj) != {"n", "axioms", "members", "gen"}:
        raise InvalidInputError("lax algebra: expected keys ['n', 'axioms', 'members', 'gen']")
    space = baxspace_from_json({k: obj[k] for k in ("n", "axioms", "members")})
    raw_gen = obj["gen"]
    if not isinstance(raw_gen, list) or len(raw_gen) != 1 << space.n:
        raise InvalidInputError("lax algebra: gen must list atom sets for every subset mask")
    gen = []
    for entry in raw_gen:
        bits = 0
        for i in entry:
            if not isinstance(i, int) or not 0 <= i < len(space.members):
                raise InvalidInputError("lax algebra: gen entries must be atom indices")
            bits |= 1 << i
        gen.append(bits)
    return LaxAlgebra(space, tuple(gen))
