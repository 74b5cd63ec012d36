"""Ax-subset spaces of the double powerset and their action on point maps.

For an axiom set Ax over ground size n, the space collects every family
of subsets that is a phi-subset for all phi in Ax, in ascending famask
order so indices are stable atom identifiers.  A point map f acts by
sending a family W to { a' | preimage of a' lies in W }, which stays
inside the codomain space; enumerate + act is the finite functor.

Enumeration strategies:

  filter     brute sweep of all 2^(2^n) famasks through the compiled
             membership programs, n <= 4
  backtrack  descending-popcount construction of up-closed families with
             leaf filtering, n <= 5; sound only when some axiom forces
             up-closure (@M, @CInf, or a degraded @Ck)
  auto       backtrack when sound, otherwise filter
"""

from __future__ import annotations

from dataclasses import dataclass

from ._backend import membership_kernels
from .core import (
    ENUM_BACKTRACK_CAP,
    ENUM_FILTER_CAP,
    Family,
    FrameMorphism,
    InvalidInputError,
    check_width,
    family_from_famask,
    full_mask,
    up_cone,
)
from .evaluate import compile_membership, is_ax_subset, realize_axiom
from .formulas import AxiomSet, axiom_set_from_specs


@dataclass(frozen=True)
class BaxSpace:
    n: int
    axioms: AxiomSet
    members: tuple[Family, ...]

    def famasks(self) -> tuple[int, ...]:
        return tuple(fam.famask() for fam in self.members)

    def index_of(self, fam: Family) -> int:
        target = fam.famask()
        masks = self.famasks()
        lo, hi = 0, len(masks)
        while lo < hi:
            mid = (lo + hi) // 2
            if masks[mid] < target:
                lo = mid + 1
            else:
                hi = mid
        if lo == len(masks) or masks[lo] != target:
            raise InvalidInputError("family is not a member of the space")
        return lo


def _split_axioms(axs: AxiomSet, n: int):
    """Compiled membership programs and residual famask predicates."""
    programs = []
    predicates = []
    for ax in axs:
        kind, payload = realize_axiom(ax, n)
        if kind == "formula":
            programs.append(compile_membership(payload, n))
        else:
            predicates.append(payload)
    return programs, predicates


def _backtrack_sound(axs: AxiomSet) -> bool:
    return any(ax.name == "M" or ax.semantic is not None for ax in axs)


def _immediate_superset_famasks(n: int) -> tuple[int, ...]:
    m = 1 << n
    succ = []
    for s in range(m):
        bits = 0
        for i in range(n):
            if not s >> i & 1:
                bits |= 1 << (s | 1 << i)
        succ.append(bits)
    return tuple(succ)


def _filter_chunk(n: int, axiom_specs: list[str], start: int, stop: int) -> list[int]:
    axs = axiom_set_from_specs(axiom_specs, n)
    programs, predicates = _split_axioms(axs, n)
    kern = membership_kernels(n)
    hits = kern.family_filter(start, stop, [p.kernel_args() for p in programs])
    if predicates:
        hits = [fm for fm in hits if all(pred(fm, n) for pred in predicates)]
    return hits


def _filter_chunk_task(args) -> list[int]:
    return _filter_chunk(*args)


def enumerate_bax(n: int, axs: AxiomSet, strategy: str = "auto", workers: int = 1) -> BaxSpace:
    """All Ax-subset families over ground size n, ascending famask order."""
    if strategy not in ("auto", "filter", "backtrack"):
        raise InvalidInputError(f"unknown strategy {strategy!r}")
    if strategy == "auto":
        strategy = "backtrack" if _backtrack_sound(axs) else "filter"
    if strategy == "backtrack" and not _backtrack_sound(axs):
        raise InvalidInputError("backtrack strategy needs an up-closure axiom (@M or a semantic closure axiom)")
    check_width(n, ENUM_BACKTRACK_CAP if strategy == "backtrack" else ENUM_FILTER_CAP, f"enumerate_bax[{strategy}]")

    if strategy == "filter":
        total = 1 << (1 << n)
        specs = axs.specs()
        if workers > 1 and total >= 1 << 12:
            import multiprocessing

            chunk_count = workers * 4
            bounds = [total * i // chunk_count for i in range(chunk_count + 1)]
            tasks = [(n, specs, bounds[i], bounds[i + 1]) for i in range(chunk_count)]
            with multiprocessing.get_context("fork").Pool(workers) as pool:
                chunks = pool.map(_filter_chunk_task, tasks)
            famasks = [fm for chunk in chunks for fm in chunk]
        else:
            famasks = _filter_chunk(n, specs, 0, total)
    else:
        _, predicates = _split_axioms(axs, n)
        # Up-closure is guaranteed by construction; the @M rows would pass
        # every leaf, so only the other programs are worth running there.
        leaf_programs = [p.kernel_args() for ax, p in _named_programs(axs, n) if ax.name != "M"]
        required = 0
        if any(ax.name == "N" for ax in axs):
            required = 1 << full_mask(n)
        kern = membership_kernels(n)
        famasks = kern.upset_enumerate(1 << n, _immediate_superset_famasks(n), required, leaf_programs)
        if predicates:
            famasks = [fm for fm in famasks if all(pred(fm, n) for pred in predicates)]

    return BaxSpace(n, axs, tuple(family_from_famask(fm) for fm in famasks))


def _named_programs(axs: AxiomSet, n: int):
    out = []
    for ax in axs:
        kind, payload = realize_axiom(ax, n)
        if kind == "formula":
            out.append((ax, compile_membership(payload, n)))
    return out


def bax_map(f: FrameMorphism, w: Family, axs: AxiomSet) -> Family:
    """Image of an Ax-subset along a point map, via preimages."""
    if not is_ax_subset(w, axs, f.n_dom):
        raise InvalidInputError("bax_map: family is not an Ax-subset of the domain")
    members = set(w.members)
    return Family.of(a for a in range(1 << f.n_cod) if f.preimage(a) in members)


def principal_iso(n: int, direction: str, value):
    """Bijection between principal up-cone families and plain subsets."""
    if direction == "from_subset":
        return up_cone(value, n)
    if direction == "to_subset":
        fam: Family = value
        if not fam.members:
            raise InvalidInputError("principal_iso: empty family has no generating subset")
        c = full_mask(n)
        for a in fam:
            c &= a
        if fam.famask() != up_cone(c, n).famask():
            raise InvalidInputError("principal_iso: family is not a principal up-cone")
        return c
    raise InvalidInputError(f"principal_iso: unknown direction {direction!r}")


def compose_morphisms(g: FrameMorphism, f: FrameMorphism) -> FrameMorphism:
    if f.n_cod != g.n_dom:
        raise InvalidInputError("compose: codomain of f must match domain of g")
    return FrameMorphism(f.n_dom, g.n_cod, tuple(g.map[y] for y in f.map))


def naturality_check(f: FrameMorphism, axs: AxiomSet, g: FrameMorphism | None = None, sample: int | None = None, seed: int = 0) -> dict:
    """Functoriality report: images land in the codomain space, and when a
    composable g is supplied, acting by g after f equals acting by g of f."""
    dom = enumerate_bax(f.n_dom, axs)
    cod = enumerate_bax(f.n_cod, axs)
    cod_famasks = set(cod.famasks())
    failures = []
    checked = 0
    for w in dom.members:
        checked += 1
        image = bax_map(f, w, axs)
        if image.famask() not in cod_famasks:
            failures.append({"family": list(w.members), "image": list(image.members)})
    if g is not None:
        gf = compose_morphisms(g, f)
        members = list(dom.members)
        if sample is not None and sample < len(members):
            import random

            members = random.Random(seed).sample(members, sample)
        for w in members:
            checked += 1
            direct = bax_map(gf, w, axs)
            staged = bax_map(g, bax_map(f, w, axs), axs)
            if direct != staged:
                failures.append({"family": list(w.members), "direct": list(direct.members), "staged": list(staged.members)})
    return {"functorial": not failures, "checked": checked, "failures": failures}


def baxspace_to_json(space: BaxSpace) -> dict:
    return {"n": space.n, "axioms": space.axioms.specs(), "members": [list(fam.members) for fam in space.members]}


def baxspace_from_json(obj: dict) -> BaxSpace:
    if not isinstance(obj, dict) or set(obj) != {"n", "axioms", "members"}:
        raise InvalidInputError("bax space: expected keys ['n', 'axioms', 'members']")
    n = obj["n"]
    if not isinstance(n, int):
        raise InvalidInputError("bax space: n must be an int")
    axs = axiom_set_from_specs([str(s) for s in obj["axioms"]], n)
    members = tuple(Family.of(raw) for raw in obj["members"])
    return BaxSpace(n, axs, members)
