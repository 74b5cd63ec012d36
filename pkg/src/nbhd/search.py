"""Frame enumeration and countermodel search over small carriers.

A frame on n points is a product of n independent family choices, so
the stream factors: pointwise constraints (one-step axiom sets and the
per-family class tags) shrink each point's candidate list before any
frame is assembled, and only whole-frame conditions (iv, canonicity,
the target formula) run on assembled frames.  Enumeration follows the
product order with the first point outermost and famasks ascending,
which is exactly the ascending lexicographic order on frame keys.

Workers partition the first point's candidate list into contiguous
chunks and results merge in chunk order, so output is identical for
every worker count.  Countermodel search scans canonical
representatives only (every class here is closed under point
relabeling), visiting n = 0, 1, ... in turn; ties break toward the
lexicographically least canonical frame and then the least assignment
index.  "checked" counts the in-class frames examined up to and
including the hit, in serial order.

Mode "count" tallies the in-class frames that validate the target, or
every in-class frame when no target is given; "checked" is always the
full in-class total there.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations, product
from multiprocessing import get_context

from .bax import enumerate_bax
from .classes import (
    FRAME_TAGS,
    ClassTag,
    family_complement,
    family_is_contingency,
    family_is_convex,
    family_is_filter,
    family_is_kappa_complete,
    family_is_up_closed,
    frame_class_check,
    parse_class_tag,
)
from .core import (
    CANONICAL_CAP,
    EXHAUSTIVE_FRAMES_CAP,
    SEARCH_MAX_N_CAP,
    Family,
    InvalidInputError,
    NeighborhoodFrame,
    check_width,
    effective_cap,
    family_from_famask,
    frame_to_json,
    full_mask,
)
from .duality import complex_algebra
from .evaluate import (
    assignment_at,
    assignment_space,
    compile_algebra,
    eval_formula,
    find_refuting_assignment,
    realize_axiom,
)
from .formulas import axiom_set_from_specs, expand_named, parse

MODES = ("find_refuting", "find_validating", "count")


@dataclass(frozen=True)
class SearchSpec:
    target: str | None = None
    constraints: tuple[str, ...] = ()
    mode: str = "find_refuting"
    max_n: int = 3

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise InvalidInputError(f"search mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "count" and self.target is None:
            raise InvalidInputError(f"search mode {self.mode} needs a target")


def apply_perm_mask(a: int, perm: tuple[int, ...]) -> int:
    out = 0
    for i, p in enumerate(perm):
        if a >> i & 1:
            out |= 1 << p
    return out


def relabel_frame(frame: NeighborhoodFrame, perm: tuple[int, ...]) -> NeighborhoodFrame:
    """Rename point x to perm[x], inside every subset mask as well."""
    if sorted(perm) != list(range(frame.n)):
        raise InvalidInputError(f"relabel_frame: {perm!r} is not a permutation of 0..{frame.n - 1}")
    families: list[Family | None] = [None] * frame.n
    for x in range(frame.n):
        families[perm[x]] = Family.of(apply_perm_mask(a, perm) for a in frame.nbhd[x])
    return NeighborhoodFrame(frame.n, tuple(families))


def canonical_form(frame: NeighborhoodFrame) -> NeighborhoodFrame:
    """Least relabeling of the frame, by the per-point famask key."""
    check_width(frame.n, effective_cap(CANONICAL_CAP), "canonical_form")
    best = frame
    best_key = frame.key()
    for perm in permutations(range(frame.n)):
        cand = relabel_frame(frame, perm)
        key = cand.key()
        if key < best_key:
            best, best_key = cand, key
    return best


def _split_constraints(constraints: tuple[str, ...]):
    axiom_specs: list[str] = []
    family_tags: list[ClassTag] = []
    centered = False
    iv = False
    for text in constraints:
        text = text.strip()
        if text in FRAME_TAGS or text.startswith("kappa:"):
            tag = parse_class_tag(text)
            if tag.name == "centered":
                centered = True
            elif tag.name == "iv":
                iv = True
            elif tag.name == "pretopological":
                family_tags.append(ClassTag("filter"))
                centered = True
            elif tag.name == "topological":
                family_tags.append(ClassTag("filter"))
                centered = True
                iv = True
            else:
                family_tags.append(tag)
        else:
            axiom_specs.append(text)
    return axiom_specs, family_tags, centered, iv


def _family_tag_holds(tag: ClassTag, fam: Family, n: int) -> bool:
    if tag.name == "monotone":
        return family_is_up_closed(fam, n)
    if tag.name == "convex":
        return family_is_convex(fam, n)
    if tag.name == "coconvex":
        return family_is_convex(family_complement(fam, n), n)
    if tag.name == "contingency":
        return family_is_contingency(fam, n)
    if tag.name == "filter":
        return family_is_filter(fam, n)
    if tag.name == "kappa":
        if tag.kappa is None:
            raise InvalidInputError("kappa tag needs a parameter, e.g. kappa:3")
        return family_is_kappa_complete(fam, n, tag.kappa)
    raise InvalidInputError(f"tag {tag.name!r} is not a per-family class")


def _compile_constraints(n: int, constraints: tuple[str, ...]):
    """Per-point famask candidate lists plus the whole-frame iv flag."""
    axiom_specs, family_tags, centered, iv = _split_constraints(constraints)
    if axiom_specs:
        base = list(enumerate_bax(n, axiom_set_from_specs(axiom_specs, n), strategy="filter").famasks())
    else:
        base = list(range(1 << (1 << n)))
    shared = []
    for famask in base:
        fam = family_from_famask(famask)
        if all(_family_tag_holds(tag, fam, n) for tag in family_tags):
            shared.append(famask)
    if not centered:
        return [shared] * n, iv
    cands = []
    for x in range(n):
        cands.append([fm for fm in shared if all(a >> x & 1 for a in family_from_famask(fm))])
    return cands, iv


def _assemble(n: int, key: tuple[int, ...]) -> NeighborhoodFrame:
    return NeighborhoodFrame(n, tuple(family_from_famask(fm) for fm in key))


def _is_canonical(frame: NeighborhoodFrame) -> bool:
    return frame.key() == canonical_form(frame).key()


def compile_target(text: str | None, n: int):
    """('formula', Formula) | ('predicate', famask test) | None from a
    target string, resolving registry names at width n."""
    if text is None:
        return None
    text = text.strip()
    if text.startswith("@"):
        return realize_axiom(expand_named(text, n), n)
    return "formula", parse(text)


_compile_target = compile_target


def _test_target(frame: NeighborhoodFrame, target) -> tuple[bool, dict[str, int] | None]:
    """(does the frame validate the target, refuting assignment if not)."""
    kind, payload = target
    if kind == "predicate":
        return all(payload(fam.famask(), frame.n) for fam in frame.nbhd), None
    env = find_refuting_assignment(complex_algebra(frame), payload)
    return env is None, env


def _scan(n, constraints, canonical, target_text, mode, first_list, collect):
    """Walk the product stream restricted to first-point famasks in
    first_list, in order.  Returns (in_class, validating, hit, keys)
    where hit = (serial in-class position, frame key, refuting env) and
    keys is filled only when collect is true.  Find modes stop at the
    first hit, so in_class then counts frames up to and including it."""
    cands, iv = _compile_constraints(n, constraints)
    target = _compile_target(target_text, n)
    rest = cands[1:] if n else []
    in_class = 0
    validating = 0
    hit = None
    keys: list[tuple[int, ...]] = []
    for first in first_list:
        for tail in product(*rest):
            key = (first, *tail) if n else ()
            frame = _assemble(n, key)
            if iv and not frame_class_check(frame, ClassTag("iv")):
                continue
            if canonical and not _is_canonical(frame):
                continue
            in_class += 1
            if collect:
                keys.append(key)
            if target is None:
                continue
            ok, env = _test_target(frame, target)
            if ok:
                validating += 1
            if mode == "find_refuting" and not ok:
                hit = (in_class, key, env)
                return in_class, validating, hit, keys
            if mode == "find_validating" and ok:
                hit = (in_class, key, None)
                return in_class, validating, hit, keys
    return in_class, validating, hit, keys


def _scan_task(args):
    return _scan(*args)


def _chunks(items: list[int], parts: int) -> list[list[int]]:
    parts = max(1, min(parts, len(items)))
    step, extra = divmod(len(items), parts)
    out = []
    pos = 0
    for i in range(parts):
        width = step + (1 if i < extra else 0)
        out.append(items[pos : pos + width])
        pos += width
    return out


def _scan_level(n, constraints, canonical, target_text, mode, workers, collect=False):
    """One carrier size, all first-point chunks merged in serial order."""
    if n == 0:
        return _scan(n, constraints, canonical, target_text, mode, [0], collect)
    cands, _ = _compile_constraints(n, constraints)
    if workers <= 1 or len(cands[0]) < 2:
        return _scan(n, constraints, canonical, target_text, mode, cands[0], collect)
    chunks = _chunks(cands[0], workers * 4)
    tasks = [(n, constraints, canonical, target_text, mode, chunk, collect) for chunk in chunks]
    ctx = get_context("fork")
    with ctx.Pool(workers) as pool:
        results = pool.map(_scan_task, tasks)
    in_class = 0
    validating = 0
    keys: list[tuple[int, ...]] = []
    for chunk_in_class, chunk_validating, hit, chunk_keys in results:
        keys.extend(chunk_keys)
        if hit is not None:
            pos, key, env = hit
            return in_class + pos, validating + chunk_validating, (in_class + pos, key, env), keys
        in_class += chunk_in_class
        validating += chunk_validating
    return in_class, validating, None, keys


def enumerate_frames(n: int, constraints=(), canonical: bool = False, workers: int = 1):
    """Stream every frame in the constrained class, one representative
    per relabeling orbit when canonical is set."""
    check_width(n, effective_cap(EXHAUSTIVE_FRAMES_CAP), "enumerate_frames")
    constraints = tuple(constraints)
    if workers <= 1:
        cands, iv = _compile_constraints(n, constraints)
        return _frame_gen(n, cands, iv, canonical)
    _, _, _, keys = _scan_level(n, constraints, canonical, None, "count", workers, collect=True)
    return (_assemble(n, key) for key in keys)


def _frame_gen(n: int, cands, iv: bool, canonical: bool):
    for key in product(*cands) if n else iter([()]):
        frame = _assemble(n, key)
        if iv and not frame_class_check(frame, ClassTag("iv")):
            continue
        if canonical and not _is_canonical(frame):
            continue
        yield frame


def count_frames(n: int, constraints=(), canonical: bool = False, workers: int = 1) -> int:
    check_width(n, effective_cap(EXHAUSTIVE_FRAMES_CAP), "count_frames")
    in_class, _, _, _ = _scan_level(n, tuple(constraints), canonical, None, "count", workers)
    return in_class


def _verify_hit(frame: NeighborhoodFrame, target, mode: str, env: dict[str, int] | None) -> None:
    """Recheck a witness through the definitional evaluator before it is
    returned; a failure here means the fast path lied."""
    kind, payload = target
    if kind == "predicate":
        ok = all(payload(fam.famask(), frame.n) for fam in frame.nbhd)
        expect = mode == "find_validating"
        if ok != expect:
            raise AssertionError("search: predicate witness failed re-verification")
        return
    alg = complex_algebra(frame)
    if mode == "find_refuting":
        if eval_formula(alg, payload, env) == full_mask(frame.n):
            raise AssertionError("search: refuting assignment failed re-verification")
        return
    program = compile_algebra(payload)
    names = list(program.names)
    total = assignment_space(frame.n, len(names), "search verify")
    for idx in range(total):
        if eval_formula(alg, payload, assignment_at(names, frame.n, idx)) != full_mask(frame.n):
            raise AssertionError("search: validating frame failed re-verification")


def find_countermodel(spec: SearchSpec, workers: int = 1) -> dict:
    """Smallest-n-first search over canonical representatives.

    Returns {"found", "frame", "assignment", "checked"} for the find
    modes and {"count", "checked"} for mode "count"."""
    check_width(spec.max_n, effective_cap(SEARCH_MAX_N_CAP), "find_countermodel")
    checked = 0
    count = 0
    for n in range(spec.max_n + 1):
        in_class, validating, hit, _ = _scan_level(
            n, spec.constraints, True, spec.target, spec.mode, workers
        )
        if spec.mode == "count":
            checked += in_class
            count += validating if spec.target is not None else in_class
            continue
        if hit is not None:
            pos, key, env = hit
            frame = _assemble(n, key)
            _verify_hit(frame, _compile_target(spec.target, n), spec.mode, env)
            return {
                "found": True,
                "frame": frame_to_json(frame),
                "assignment": env,
                "checked": checked + pos,
            }
        checked += in_class
    if spec.mode == "count":
        return {"count": count, "checked": checked}
    return {"found": False, "frame": None, "assignment": None, "checked": checked}
