"""Command-line surface: one verb per construction, stable JSON out.

Exit codes: 0 success or a true verdict, 1 a false verdict (a refuting
assignment exists, a countermodel was found, a validating frame was not
found, a class check failed), 2 usage or input errors, 3 cap or output
limit errors.  Machine output goes to stdout, diagnostics to stderr.
"-" names stdin for any file argument.  Output is compact JSON; --pretty
switches to indented form and is mutually exclusive with --json.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bax import bax_map, baxspace_to_json, enumerate_bax
from .classes import (
    ALGEBRA_TAGS,
    CORRESPONDENCE_PAIRS,
    FRAME_TAGS,
    algebra_class_check,
    correspondence_check,
    frame_class_check,
    parse_class_tag,
)
from .core import (
    CapExceededError,
    Family,
    InvalidInputError,
    NbhdError,
    algebra_from_json,
    algebra_to_json,
    frame_from_json,
    frame_to_json,
    hom_from_json,
    hom_to_json,
    is_nbhd_morphism,
    morphism_from_json,
    morphism_to_json,
)
from .duality import (
    atom_frame,
    complex_algebra,
    dualize_complete_hom,
    dualize_frame_morphism,
    lax_algebra,
    lax_from_json,
    lax_to_json,
    onestep_top_check,
)
from .evaluate import eval_formula
from .formulas import (
    ParseError,
    axiom_set_from_specs,
    expand_named,
    free_vars,
    is_one_step,
    modal_depth,
    parse as parse_formula,
    render,
)
from .genframe import (
    complement_within_admissible,
    general_frame_from_json,
    general_frame_report,
    general_frame_to_json,
    is_pi_descriptive,
    is_sigma_descriptive,
    pi_extend,
    sigma_extend,
    truncate,
)
from .search import (
    SearchSpec,
    compile_target,
    count_frames,
    enumerate_frames,
    find_countermodel,
)


class OutputLimitError(NbhdError):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_json(path: str):
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"bad JSON in {path!r}: {exc}") from exc


def _parse_inline_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"bad JSON for {what}: {exc}") from exc


def _emit(obj, args) -> None:
    if args.pretty:
        text = json.dumps(obj, indent=2, sort_keys=False)
    else:
        text = json.dumps(obj, separators=(",", ":"), sort_keys=False)
    data = text + "\n"
    if args.limit_bytes is not None and len(data.encode("utf-8")) > args.limit_bytes:
        raise OutputLimitError(f"output of {len(data.encode('utf-8'))} bytes exceeds --limit-bytes {args.limit_bytes}")
    sys.stdout.write(data)


def _split_specs(text: str) -> list[str]:
    parts = [part.strip() for part in text.split(",")]
    return [part for part in parts if part]


def _formula_arg(text: str):
    """Formula text or a registry @name, via stdin when '-'."""
    if text == "-":
        text = sys.stdin.read().strip()
    return text


def cmd_parse(args) -> int:
    text = _formula_arg(args.formula)
    if text.strip().startswith("@"):
        ax = expand_named(text.strip())
        if ax.formula is None:
            raise InvalidInputError(f"@{ax.name} has no formula form; it is a family shape test")
        f = ax.formula
    else:
        f = parse_formula(text)
    _emit(
        {
            "formula": render(f),
            "vars": list(free_vars(f)),
            "one_step": is_one_step(f),
            "modal_depth": modal_depth(f),
        },
        args,
    )
    return 0


def _algebra_from_args(args):
    if getattr(args, "algebra", None) and getattr(args, "frame", None):
        raise InvalidInputError("give either an algebra or a frame, not both")
    if getattr(args, "algebra", None):
        return algebra_from_json(_load_json(args.algebra))
    if getattr(args, "frame", None):
        return complex_algebra(frame_from_json(_load_json(args.frame)))
    raise InvalidInputError("an algebra or a frame input is required")


def cmd_eval(args) -> int:
    alg = _algebra_from_args(args)
    kind, payload = compile_target(_formula_arg(args.formula), alg.n)
    if kind != "formula":
        raise InvalidInputError("this axiom is a family shape test; it cannot be evaluated pointwise")
    env_raw = _parse_inline_json(args.assign, "--assign")
    if not isinstance(env_raw, dict):
        raise InvalidInputError("--assign must be a JSON object of variable masks")
    value = eval_formula(alg, payload, env_raw)
    _emit({"value": value}, args)
    return 0


def cmd_valid(args) -> int:
    alg = _algebra_from_args(args)
    kind, payload = compile_target(_formula_arg(args.formula), alg.n)
    if kind == "predicate":
        frame = atom_frame(alg)
        ok = all(payload(fam.famask(), frame.n) for fam in frame.nbhd)
        _emit({"valid": ok, "witness": None}, args)
        return 0 if ok else 1
    from .evaluate import find_refuting_assignment

    witness = find_refuting_assignment(alg, payload)
    _emit({"valid": witness is None, "witness": witness}, args)
    return 0 if witness is None else 1


def cmd_dualize(args) -> int:
    if bool(args.frame) == bool(args.algebra):
        raise InvalidInputError("give exactly one of --frame or --algebra")
    if args.frame:
        alg = complex_algebra(frame_from_json(_load_json(args.frame)))
        _emit(algebra_to_json(alg), args)
    else:
        frame = atom_frame(algebra_from_json(_load_json(args.algebra)))
        _emit(frame_to_json(frame), args)
    return 0


def cmd_bax_enum(args) -> int:
    axs = axiom_set_from_specs(_split_specs(args.axioms), args.n)
    space = enumerate_bax(args.n, axs, strategy=args.strategy, workers=args.workers)
    if args.count:
        _emit({"count": len(space.members)}, args)
    else:
        _emit(baxspace_to_json(space), args)
    return 0


def cmd_bax_map(args) -> int:
    f = morphism_from_json(_load_json(args.morphism))
    axs = axiom_set_from_specs(_split_specs(args.axioms))
    raw = _parse_inline_json(args.family, "--family")
    if not isinstance(raw, list):
        raise InvalidInputError("--family must be a JSON list of subset masks")
    image = bax_map(f, Family.of(raw), axs)
    _emit({"family": list(image.members)}, args)
    return 0


def cmd_lax_build(args) -> int:
    axs = axiom_set_from_specs(_split_specs(args.axioms), args.n)
    lax = lax_algebra(args.n, axs, strategy=args.strategy)
    _emit(lax_to_json(lax), args)
    return 0


def cmd_lax_check(args) -> int:
    lax = lax_from_json(_load_json(args.lax))
    per = {ax.name: onestep_top_check(lax, ax) for ax in lax.space.axioms}
    ok = all(per.values())
    _emit({"ok": ok, "axioms": per}, args)
    return 0 if ok else 1


def cmd_class_check(args) -> int:
    tag = parse_class_tag(args.tag)
    if bool(args.frame) == bool(args.algebra):
        raise InvalidInputError("give exactly one of --frame or --algebra")
    if args.frame:
        holds = frame_class_check(frame_from_json(_load_json(args.frame)), tag)
    else:
        holds = algebra_class_check(algebra_from_json(_load_json(args.algebra)), tag)
    _emit({"tag": args.tag, "holds": holds}, args)
    return 0 if holds else 1


def cmd_class_correspond(args) -> int:
    frame = frame_from_json(_load_json(args.frame))
    report = correspondence_check(frame, args.pair)
    _emit(report, args)
    return 0 if report["agree"] else 1


def cmd_gen_validate(args) -> int:
    report = general_frame_report(general_frame_from_json(_load_json(args.general)))
    _emit(report, args)
    return 0 if report["valid"] else 1


def cmd_gen_sigma(args) -> int:
    frame = sigma_extend(general_frame_from_json(_load_json(args.general)))
    _emit(frame_to_json(frame), args)
    return 0


def cmd_gen_pi(args) -> int:
    frame = pi_extend(general_frame_from_json(_load_json(args.general)))
    _emit(frame_to_json(frame), args)
    return 0


def cmd_gen_complement(args) -> int:
    gf = complement_within_admissible(general_frame_from_json(_load_json(args.general)))
    _emit(general_frame_to_json(gf), args)
    return 0


def cmd_gen_truncate(args) -> int:
    frame = frame_from_json(_load_json(args.frame))
    raw = _parse_inline_json(args.admissible, "--admissible")
    if not isinstance(raw, list):
        raise InvalidInputError("--admissible must be a JSON list of subset masks")
    gf = truncate(frame, Family.of(raw))
    _emit(general_frame_to_json(gf), args)
    return 0


def cmd_gen_descriptive(args) -> int:
    gf = general_frame_from_json(_load_json(args.general))
    sigma = is_sigma_descriptive(gf)
    pi = is_pi_descriptive(gf)
    _emit({"sigma": sigma, "pi": pi}, args)
    return 0 if sigma else 1


def cmd_morphism_check(args) -> int:
    f = morphism_from_json(_load_json(args.morphism))
    dom = frame_from_json(_load_json(args.dom))
    cod = frame_from_json(_load_json(args.cod))
    ok = is_nbhd_morphism(f, dom, cod)
    _emit({"is_morphism": ok}, args)
    return 0 if ok else 1


def cmd_morphism_dualize(args) -> int:
    if bool(args.morphism) == bool(args.hom):
        raise InvalidInputError("give exactly one of --morphism or --hom")
    if args.morphism:
        _emit(hom_to_json(dualize_frame_morphism(morphism_from_json(_load_json(args.morphism)))), args)
    else:
        _emit(morphism_to_json(dualize_complete_hom(hom_from_json(_load_json(args.hom)))), args)
    return 0


def cmd_search_countermodel(args) -> int:
    constraints = tuple(_split_specs(args.constraints)) if args.constraints else ()
    spec = SearchSpec(
        target=_formula_arg(args.target) if args.target else None,
        constraints=constraints,
        mode=args.mode,
        max_n=args.max_n,
    )
    result = find_countermodel(spec, workers=args.workers)
    _emit(result, args)
    if spec.mode == "find_refuting":
        return 1 if result["found"] else 0
    if spec.mode == "find_validating":
        return 0 if result["found"] else 1
    return 0


def cmd_search_enumerate(args) -> int:
    constraints = _split_specs(args.constraints) if args.constraints else []
    if args.count:
        total = count_frames(args.n, constraints, canonical=args.canonical, workers=args.workers)
        _emit({"count": total}, args)
    else:
        frames = [frame_to_json(frame) for frame in enumerate_frames(args.n, constraints, canonical=args.canonical, workers=args.workers)]
        _emit({"frames": frames}, args)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nbhd",
        description="Neighborhood frames, their algebras, and the constructions between them.",
    )
    parser.add_argument("--seed", type=int, default=0, help="seed for sampled modes")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for enumerations")
    parser.add_argument("--json", action="store_true", help="compact JSON output (the default)")
    parser.add_argument("--pretty", action="store_true", help="indented JSON output")
    parser.add_argument("--limit-bytes", type=int, default=None, help="fail with exit 3 if output exceeds this size")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a formula and report its shape")
    p.add_argument("--formula", required=True, help="formula text, @name, or - for stdin")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("eval", help="evaluate a formula in an algebra under an assignment")
    p.add_argument("--algebra", help="algebra JSON file or -")
    p.add_argument("--frame", help="frame JSON file or -; its complex algebra is used")
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", required=True, help='JSON object, e.g. {"u":1,"v":0}')
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("valid", help="exit 0 when the formula holds under every assignment")
    p.add_argument("--algebra", help="algebra JSON file or -")
    p.add_argument("--frame", help="frame JSON file or -; its complex algebra is used")
    p.add_argument("--formula", required=True)
    p.set_defaults(func=cmd_valid)

    p = sub.add_parser("dualize", help="frame to its algebra, or algebra to its atom frame")
    p.add_argument("--frame", help="frame JSON file or -")
    p.add_argument("--algebra", help="algebra JSON file or -")
    p.set_defaults(func=cmd_dualize)

    p_bax = sub.add_parser("bax", help="families closed under a one-step axiom set")
    bax_sub = p_bax.add_subparsers(dest="subcommand", required=True)
    p = bax_sub.add_parser("enum", help="enumerate all closed families at width n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--axioms", required=True, help="comma-separated @names or one-step formulas")
    p.add_argument("--strategy", choices=("auto", "filter", "backtrack"), default="auto")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_bax_enum)
    p = bax_sub.add_parser("map", help="push a closed family along a point map")
    p.add_argument("--morphism", required=True, help="point map JSON file or -")
    p.add_argument("--axioms", required=True)
    p.add_argument("--family", required=True, help="JSON list of subset masks")
    p.set_defaults(func=cmd_bax_map)

    p_lax = sub.add_parser("lax", help="one-step algebra over the closed families")
    lax_sub = p_lax.add_subparsers(dest="subcommand", required=True)
    p = lax_sub.add_parser("build")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--axioms", required=True)
    p.add_argument("--strategy", choices=("auto", "filter", "backtrack"), default="auto")
    p.set_defaults(func=cmd_lax_build)
    p = lax_sub.add_parser("check", help="verify each axiom evaluates to the top element")
    p.add_argument("--lax", required=True, help="lax algebra JSON file or -")
    p.set_defaults(func=cmd_lax_check)

    p_class = sub.add_parser("class", help="frame and algebra class membership")
    class_sub = p_class.add_subparsers(dest="subcommand", required=True)
    p = class_sub.add_parser("check")
    p.add_argument("--frame", help="frame JSON file or -")
    p.add_argument("--algebra", help="algebra JSON file or -")
    p.add_argument("--tag", required=True, help=f"frame tags: {', '.join(FRAME_TAGS)}; algebra tags: {', '.join(ALGEBRA_TAGS)}")
    p.set_defaults(func=cmd_class_check)
    p = class_sub.add_parser("correspond", help="two-sided frame/algebra property agreement")
    p.add_argument("--frame", required=True)
    p.add_argument("--pair", required=True, choices=CORRESPONDENCE_PAIRS)
    p.set_defaults(func=cmd_class_correspond)

    p_gen = sub.add_parser("gen", help="general frames and the sigma/pi extensions")
    gen_sub = p_gen.add_subparsers(dest="subcommand", required=True)
    p = gen_sub.add_parser("validate", help="report subalgebra closure and separation flags")
    p.add_argument("--general", required=True, help="general frame JSON file or -")
    p.set_defaults(func=cmd_gen_validate)
    p = gen_sub.add_parser("sigma", help="sigma extension as a plain frame")
    p.add_argument("--general", required=True)
    p.set_defaults(func=cmd_gen_sigma)
    p = gen_sub.add_parser("pi", help="pi extension as a plain frame")
    p.add_argument("--general", required=True)
    p.set_defaults(func=cmd_gen_pi)
    p = gen_sub.add_parser("complement", help="complement the neighborhoods within the admissibles")
    p.add_argument("--general", required=True)
    p.set_defaults(func=cmd_gen_complement)
    p = gen_sub.add_parser("truncate", help="restrict a frame to an admissible subalgebra")
    p.add_argument("--frame", required=True)
    p.add_argument("--admissible", required=True, help="JSON list of subset masks")
    p.set_defaults(func=cmd_gen_truncate)
    p = gen_sub.add_parser("descriptive", help="is the frame its own sigma (and pi) extension; exit 0 when sigma holds")
    p.add_argument("--general", required=True)
    p.set_defaults(func=cmd_gen_descriptive)

    p_mor = sub.add_parser("morphism", help="point maps between frames and their duals")
    mor_sub = p_mor.add_subparsers(dest="subcommand", required=True)
    p = mor_sub.add_parser("check")
    p.add_argument("--morphism", required=True)
    p.add_argument("--dom", required=True)
    p.add_argument("--cod", required=True)
    p.set_defaults(func=cmd_morphism_check)
    p = mor_sub.add_parser("dualize")
    p.add_argument("--morphism", help="point map JSON file or -")
    p.add_argument("--hom", help="atom-map hom JSON file or -")
    p.set_defaults(func=cmd_morphism_dualize)

    p_search = sub.add_parser("search", help="frame enumeration and countermodel search")
    search_sub = p_search.add_subparsers(dest="subcommand", required=True)
    p = search_sub.add_parser("countermodel", help="smallest frame refuting (or validating) a target")
    p.add_argument("--target", help="formula text or @name")
    p.add_argument("--constraints", default="", help="comma-separated class tags, @names, or one-step formulas")
    p.add_argument("--max-n", type=int, default=3, dest="max_n")
    p.add_argument("--mode", choices=("find_refuting", "find_validating", "count"), default="find_refuting")
    p.set_defaults(func=cmd_search_countermodel)
    p = search_sub.add_parser("enumerate", help="stream or count the frames in a constrained class")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--constraints", default="")
    p.add_argument("--canonical", action="store_true")
    p.add_argument("--count", action="store_true")
    p.set_defaults(func=cmd_search_enumerate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.json and args.pretty:
        sys.stderr.write("nbhd: --json and --pretty are mutually exclusive\n")
        return 2
    try:
        return args.func(args)
    except OutputLimitError as exc:
        sys.stderr.write(f"nbhd: {exc}\n")
        return 3
    except CapExceededError as exc:
        sys.stderr.write(f"nbhd: {exc}\n")
        return 3
    except ParseError as exc:
        sys.stderr.write(f"nbhd: {exc}\n")
        return 2
    except InvalidInputError as exc:
        sys.stderr.write(f"nbhd: {exc}\n")
        return 2
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        sys.stderr.write(f"nbhd: {exc}\n")
        return 2
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
