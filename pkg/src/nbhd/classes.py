"""Frame and algebra class predicates and the two correspondence pairs.

Frame tags test each neighborhood family, or the whole frame for the
centered and iv conditions; algebra tags test the box table.  The bridge
pairs tie the sides together: a frame is centered exactly when its
complex algebra satisfies box a <= a, and satisfies the iv condition
exactly when the complex algebra satisfies box box a <= box a.  Both
sides are computed independently so the agreement stays a real check.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Family, InvalidInputError, NeighborhoodAlgebra, NeighborhoodFrame, box_n, full_mask
from .duality import complex_algebra
from .evaluate import validates
from .formulas import expand_named


def family_is_up_closed(fam: Family, n: int) -> bool:
    members = set(fam.members)
    for a in fam:
        for i in range(n):
            if a >> i & 1:
                continue
            if (a | 1 << i) not in members:
                return False
    return True


def family_is_convex(fam: Family, n: int) -> bool:
    """Every subset between two members is a member."""
    members = set(fam.members)
    for a in fam:
        for b in fam:
            if a & b != a:
                continue
            gap = b & ~a
            t = gap
            while t:
                if (a | t) not in members:
                    return False
                t = (t - 1) & gap
    return True


def family_complement(fam: Family, n: int) -> Family:
    members = set(fam.members)
    return Family(tuple(a for a in range(1 << n) if a not in members))


def family_is_pair_intersection_closed(fam: Family) -> bool:
    members = set(fam.members)
    for a in fam:
        for b in fam:
            if a & b not in members:
                return False
    return True


def family_is_filter(fam: Family, n: int) -> bool:
    """Up-closed, closed under pair meets, and containing the full set."""
    return full_mask(n) in fam and family_is_up_closed(fam, n) and family_is_pair_intersection_closed(fam)


def family_is_contingency(fam: Family, n: int) -> bool:
    members = set(fam.members)
    full = full_mask(n)
    return all((full ^ a) in members for a in fam)


def family_is_kappa_complete(fam: Family, n: int, kappa: int) -> bool:
    """Up-closed and closed under meets of fewer than kappa members, the
    empty meet (the full set) included.  On a finite carrier the pair meet
    generates every larger finite meet, so sizes 0 and 2 decide it."""
    if kappa < 1:
        raise InvalidInputError("kappa completeness needs kappa >= 1")
    if not family_is_up_closed(fam, n):
        return False
    if full_mask(n) not in fam:
        return False
    if kappa >= 3 and not family_is_pair_intersection_closed(fam):
        return False
    return True


FRAME_TAGS = ("monotone", "convex", "coconvex", "contingency", "filter", "kappa", "centered", "iv", "pretopological", "topological")
ALGEBRA_TAGS = ("bam", "normal", "t", "four", "preinterior", "interior", "contingency", "convex")


@dataclass(frozen=True)
class ClassTag:
    name: str
    kappa: int | None = None


def parse_class_tag(text: str) -> ClassTag:
    text = text.strip()
    if text.startswith("kappa:"):
        try:
            k = int(text.split(":", 1)[1])
        except ValueError:
            raise InvalidInputError(f"bad kappa tag {text!r}")
        return ClassTag("kappa", k)
    return ClassTag(text)


def frame_class_check(frame: NeighborhoodFrame, tag: ClassTag) -> bool:
    name = tag.name
    if name == "monotone":
        return all(family_is_up_closed(fam, frame.n) for fam in frame.nbhd)
    if name == "convex":
        return all(family_is_convex(fam, frame.n) for fam in frame.nbhd)
    if name == "coconvex":
        return all(family_is_convex(family_complement(fam, frame.n), frame.n) for fam in frame.nbhd)
    if name == "contingency":
        return all(family_is_contingency(fam, frame.n) for fam in frame.nbhd)
    if name == "filter":
        return all(family_is_filter(fam, frame.n) for fam in frame.nbhd)
    if name == "kappa":
        if tag.kappa is None:
            raise InvalidInputError("kappa tag needs a parameter, e.g. kappa:3")
        return all(family_is_kappa_complete(fam, frame.n, tag.kappa) for fam in frame.nbhd)
    if name == "centered":
        return all(all(a >> x & 1 for a in fam) for x, fam in enumerate(frame.nbhd))
    if name == "iv":
        return all(box_n(frame, a) in fam for fam in frame.nbhd for a in fam)
    if name == "pretopological":
        return frame_class_check(frame, ClassTag("filter")) and frame_class_check(frame, ClassTag("centered"))
    if name == "topological":
        return frame_class_check(frame, ClassTag("pretopological")) and frame_class_check(frame, ClassTag("iv"))
    raise InvalidInputError(f"unknown frame class {name!r}")


def algebra_class_check(alg: NeighborhoodAlgebra, tag: ClassTag) -> bool:
    name = tag.name
    full = full_mask(alg.n)
    if name == "bam":
        # Single-bit steps generate the full inclusion order.
        for a in range(1 << alg.n):
            for i in range(alg.n):
                if a >> i & 1:
                    continue
                if alg.box[a] & ~alg.box[a | 1 << i]:
                    return False
        return True
    if name == "normal":
        return validates(alg, expand_named("@N").formula) and validates(alg, expand_named("@C").formula)
    if name == "t":
        return all(alg.box[a] & ~a == 0 for a in range(1 << alg.n))
    if name == "four":
        return all(alg.box[a] & ~alg.box[alg.box[a]] == 0 for a in range(1 << alg.n))
    if name == "preinterior":
        return algebra_class_check(alg, ClassTag("normal")) and algebra_class_check(alg, ClassTag("t"))
    if name == "interior":
        return algebra_class_check(alg, ClassTag("preinterior")) and algebra_class_check(alg, ClassTag("four"))
    if name == "contingency":
        return all(alg.box[a] == alg.box[full ^ a] for a in range(1 << alg.n))
    if name == "convex":
        return validates(alg, expand_named("@Conv").formula)
    raise InvalidInputError(f"unknown algebra class {name!r}")


CORRESPONDENCE_PAIRS = ("CentT", "IV4")


def correspondence_check(frame: NeighborhoodFrame, pair: str) -> dict:
    """Two-sided report for one of the frame/algebra bridge pairs."""
    alg = complex_algebra(frame)
    if pair == "CentT":
        frame_side = frame_class_check(frame, ClassTag("centered"))
        algebra_side = algebra_class_check(alg, ClassTag("t"))
    elif pair == "IV4":
        frame_side = frame_class_check(frame, ClassTag("iv"))
        algebra_side = algebra_class_check(alg, ClassTag("four"))
    else:
        raise InvalidInputError(f"unknown correspondence pair {pair!r}")
    return {"pair": pair, "frame_side": frame_side, "algebra_side": algebra_side, "agree": frame_side == algebra_side}
