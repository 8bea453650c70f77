"""Command-line front end and the JSON serialization of models and relations.

Model files:
  {"type": "neighborhood", "states": ["s", "t"],
   "N": {"s": [[], ["s", "t"]], "t": [[], ["s", "t"]]}, "V": {"p": ["s"]}}
  {"type": "kripke", "states": ["s", "t"],
   "R": {"s": ["s", "t"], "t": []}, "V": {"p": ["s"]}}

Sets are sorted arrays and duplicates are a validation error.  Pair-relation
files are {"pairs": [["s", "s'"], ...]}.  Exit codes: 0 the checked statement
holds (or the command just produced output), 1 a counterexample or violation
was found, 2 usage or validation error.  DELTA_LAB_BUDGET overrides the
subset-enumeration budgets.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from . import bisim, definability, generators, proofsys, transform
from .formula import Formula, ParseError, parse
from .model import (FRAME_CLASSES, BudgetError, KripkeModel,
                    NeighborhoodModel, frame_class, validate)
from .semantics import SemanticsKind, evaluate, frame_valid

EXIT_OK = 0
EXIT_FOUND = 1
EXIT_USAGE = 2

DEFAULT_BUDGET = 24


class CliError(Exception):
    """Invalid flags or input files; maps to exit code 2."""


# ---------------------------------------------------------------------------
# Serialization.

def _sorted_set(names: list[str], what: str) -> list[str]:
    if len(set(names)) != len(names):
        raise CliError(f"duplicate entries in {what}")
    return sorted(names)


def model_to_json(m: NeighborhoodModel | KripkeModel) -> dict[str, Any]:
    out: dict[str, Any] = {"states": sorted(m.states)}
    if isinstance(m, NeighborhoodModel):
        out["type"] = "neighborhood"
        out["N"] = {name: sorted((list(m.names(x)) for x in m.neighborhoods[i]),
                                 key=lambda xs: (len(xs), xs))
                    for i, name in enumerate(m.states)}
    else:
        out["type"] = "kripke"
        out["R"] = {name: list(m.names(m.succ[i]))
                    for i, name in enumerate(m.states)}
    out["V"] = {atom: list(m.names(mask))
                for atom, mask in sorted(m.valuation.items())}
    return out


def model_from_json(data: dict[str, Any]) -> NeighborhoodModel | KripkeModel:
    try:
        kind = data["type"]
        states = _sorted_set(list(data["states"]), "states")
        valuation = {atom: _sorted_set(list(group), f"V[{atom}]")
                     for atom, group in data.get("V", {}).items()}
        if kind == "neighborhood":
            nbhd = {}
            for name, groups in data.get("N", {}).items():
                seen = [tuple(_sorted_set(list(g), f"N[{name}]")) for g in groups]
                if len(set(seen)) != len(seen):
                    raise CliError(f"duplicate neighborhoods at N[{name}]")
                nbhd[name] = seen
            m = NeighborhoodModel.from_names(states, nbhd, valuation)
        elif kind == "kripke":
            succ = {name: _sorted_set(list(group), f"R[{name}]")
                    for name, group in data.get("R", {}).items()}
            m = KripkeModel.from_names(states, succ, valuation)
        else:
            raise CliError(f"unknown model type {kind!r}")
    except CliError:
        raise
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise CliError(f"malformed model file: {exc}") from exc
    problems = validate(m)
    if problems:
        raise CliError("invalid model: " + "; ".join(problems))
    return m


def load_model(path: str) -> NeighborhoodModel | KripkeModel:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc
    return model_from_json(data)


def load_pairs(path: str) -> bisim.PairRelation:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        pairs = [(a, b) for a, b in data["pairs"]]
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise CliError(f"malformed pair-relation file {path}: {exc}") from exc
    return bisim.PairRelation.of(pairs)


def _witness_json(m, check) -> dict[str, Any]:
    return {"valuation": {atom: list(m.names(mask))
                          for atom, mask in sorted(check.valuation.items())},
            "state": check.state}


def _emit(args, payload: dict[str, Any], human: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(human)


def _parse_formula(text: str) -> Formula:
    try:
        return parse(text)
    except ParseError as exc:
        raise CliError(f"bad formula: {exc}") from exc


def _semantics(name: str) -> SemanticsKind:
    try:
        return SemanticsKind(name)
    except ValueError:
        raise CliError(f"unknown semantics {name!r}") from None


def _class_props(name: str):
    try:
        return frame_class(name)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommands.

def _cmd_eval(args) -> int:
    m = load_model(args.model)
    f = _parse_formula(args.formula)
    kind = _semantics(args.semantics)
    try:
        value = evaluate(m, args.state, f, kind)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _emit(args, {"value": value}, str(value).lower())
    return EXIT_OK


def _cmd_transform(args) -> int:
    m = load_model(args.model)
    try:
        if args.kind == "c-variation":
            if not isinstance(m, NeighborhoodModel):
                raise CliError("c-variation needs a neighborhood model")
            out = transform.c_variation(m)
        elif args.kind == "qf-variation":
            if not isinstance(m, KripkeModel):
                raise CliError("qf-variation needs a Kripke model")
            out = transform.qf_variation(m)
        else:
            if not isinstance(m, NeighborhoodModel):
                raise CliError("qf-to-kripke needs a neighborhood model")
            out = transform.qf_to_kripke(m)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = json.dumps(model_to_json(out), sort_keys=True, ensure_ascii=False)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK


def _bisim_kind(name: str) -> bisim.BisimKind:
    try:
        return bisim.BisimKind(name)
    except ValueError:
        raise CliError(f"unknown bisimulation kind {name!r}") from None


def _cmd_bisim(args) -> int:
    left, right = load_model(args.left), load_model(args.right)
    kind = _bisim_kind(args.kind)
    try:
        if args.action == "check":
            if not args.pairs:
                raise CliError("bisim check needs --pairs")
            z = load_pairs(args.pairs)
            verdict = bisim.check_bisim(kind, z, left, right, args.budget)
            payload = {"ok": verdict.ok}
            if not verdict.ok:
                payload["pair"] = list(verdict.pair)
                payload["reason"] = verdict.reason
                if verdict.witness:
                    payload["witness"] = [list(w) for w in verdict.witness]
                _emit(args, payload,
                      f"violation at pair {verdict.pair}: {verdict.reason}")
                return EXIT_FOUND
            _emit(args, payload, "ok")
            return EXIT_OK
        z = bisim.max_bisim(kind, left, right, args.budget)
        payload = {"pairs": sorted(list(p) for p in z.pairs)}
        human = ("no bisimilar pairs" if not z.pairs else
                 " ".join(f"({a},{b})" for a, b in sorted(z.pairs)))
        _emit(args, payload, human)
        return EXIT_OK
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _cmd_equiv_partition(args) -> int:
    models = [load_model(path) for path in args.models]
    vocab = [v for v in args.vocab.split(",") if v]
    kind = _semantics(args.semantics)
    try:
        part = bisim.logical_equiv_partition(models, vocab, kind)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    blocks = [sorted(f"{mi}:{models[mi].states[s]}" for mi, s in block)
              for block in part.blocks_at(part.depth)]
    payload = {"depth": part.depth, "blocks": sorted(blocks)}
    human = f"depth {part.depth}: " + " | ".join(
        "{" + ", ".join(b) + "}" for b in sorted(blocks))
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_definability(args) -> int:
    if args.builtin:
        try:
            claim = definability.builtin_claim(args.builtin)
        except ValueError as exc:
            raise CliError(str(exc)) from exc
    else:
        if not args.property or not args.formula:
            raise CliError("give either --builtin or both --property and --formula")
        from .model import FrameProperty
        claim = definability.DefinabilityClaim(
            FrameProperty.from_letter(args.property),
            _parse_formula(args.formula), args.background)
    if args.jobs > 1 and claim.background in FRAME_CLASSES:
        result = _parallel_defines(claim, args.max_states, args.jobs,
                                   args.budget)
    else:
        result = definability.defines(claim, args.max_states,
                                      max_bits=args.budget)
    if result.confirmed:
        _emit(args, {"confirmed": True, "frames": result.frames_checked},
              f"confirmed ({result.frames_checked} frames)")
        return EXIT_OK
    counter = result.counterexample
    payload = {"confirmed": False, "frames": result.frames_checked,
               "direction": counter.direction,
               "frame": model_to_json(counter.frame)}
    if counter.witness is not None:
        payload["witness"] = _witness_json(counter.frame, counter.witness)
    _emit(args, payload,
          f"counterexample after {result.frames_checked} frames "
          f"({counter.direction})")
    return EXIT_FOUND


def _cmd_audit(args) -> int:
    try:
        system = proofsys.AxiomSystem(args.system)
    except ValueError:
        raise CliError(f"unknown system {args.system!r}") from None
    if args.negative:
        if args.negative != "filter-deltaequ":
            raise CliError(f"unknown negative claim {args.negative!r}")
        witness = proofsys.filter_equ_witness(args.max_states, args.budget)
        if witness is None:
            _emit(args, {"found": False}, "no witness up to the bound")
            return EXIT_OK
        frame, check = witness
        _emit(args, {"found": True, "frame": model_to_json(frame),
                     "witness": _witness_json(frame, check)},
              f"witness frame found; falsified at state {check.state}")
        return EXIT_FOUND
    if args.jobs > 1:
        report = _parallel_audit(system, args.max_states, args.jobs,
                                 args.budget)
    else:
        report = proofsys.audit_soundness(system, args.max_states,
                                          args.budget)
    lines = []
    payload_axioms = []
    for audit in report.axioms:
        status = "valid" if audit.valid else "INVALID"
        lines.append(f"{audit.name}: {status} "
                     f"({audit.frames_checked} frames)")
        entry = {"axiom": audit.name, "valid": audit.valid,
                 "frames": audit.frames_checked}
        if audit.counterexample:
            frame, check = audit.counterexample
            entry["frame"] = model_to_json(frame)
            entry["witness"] = _witness_json(frame, check)
        payload_axioms.append(entry)
    _emit(args, {"system": system.value, "ok": report.ok,
                 "axioms": payload_axioms}, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_FOUND


def _cmd_proof_check(args) -> int:
    try:
        system = proofsys.AxiomSystem(args.system)
    except ValueError:
        raise CliError(f"unknown system {args.system!r}") from None
    try:
        with open(args.script, encoding="utf-8") as fh:
            raw = json.load(fh)
        script = [proofsys.ProofLine(_parse_formula(line["formula"]),
                                     line["by"]) for line in raw]
    except OSError as exc:
        raise CliError(f"cannot read {args.script}: {exc}") from exc
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliError(f"malformed proof script: {exc}") from exc
    if not script:
        raise CliError("empty proof script")
    verdict = proofsys.check_proof(system, script)
    if verdict.ok:
        _emit(args, {"ok": True, "lines": len(script)},
              f"ok ({len(script)} lines)")
        return EXIT_OK
    _emit(args, {"ok": False, "line": verdict.line, "reason": verdict.reason},
          f"invalid line {verdict.line}: {verdict.reason}")
    return EXIT_FOUND


def _cmd_countermodel(args) -> int:
    f = _parse_formula(args.formula)
    _class_props(args.klass)
    found = proofsys.countermodel_search(f, args.klass, args.max_states,
                                         args.budget)
    if found is None:
        _emit(args, {"found": False, "max_states": args.max_states},
              f"none up to {args.max_states} states")
        return EXIT_OK
    model, state = found
    _emit(args, {"found": True, "model": model_to_json(model), "state": state},
          f"falsified at state {state}")
    return EXIT_FOUND


def _cmd_enumerate(args) -> int:
    props = _class_props(args.klass) if args.klass else frozenset()
    spec = generators.GenSpec(n_states=args.states, properties=props,
                              seed=args.seed, mode=args.mode, count=args.count)
    try:
        if args.kind == "kripke":
            stream = generators.enum_kripke_frames(spec)
        else:
            stream = generators.enum_frames(spec)
        if args.jobs > 1 and args.kind == "frames" and args.mode == "exhaustive":
            stream = _parallel_frames(spec, args.jobs)
        total = 0
        for frame in stream:
            total += 1
            if not args.count_only:
                print(json.dumps(model_to_json(frame), sort_keys=True,
                                 ensure_ascii=False))
            if args.limit and total >= args.limit:
                break
        if args.count_only:
            _emit(args, {"count": total}, str(total))
        return EXIT_OK
    except BudgetError as exc:
        raise CliError(str(exc)) from exc


def _sweep_ranges(total: int, jobs: int) -> list[tuple[int, int]]:
    chunk = (total + jobs - 1) // jobs
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def _parallel_frames(spec: generators.GenSpec, jobs: int):
    """Partition the admissible index space into contiguous ranges per
    worker; concatenating the ranges preserves the canonical order."""
    import concurrent.futures

    letters = tuple(sorted(p.value for p in spec.properties))
    lists, _ = generators.admissible_space(spec.n_states,
                                           spec.properties)
    total = 1
    for radix in lists:
        total *= len(radix)
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        for part in pool.map(_frames_in_range,
                             [(spec.n_states, letters, lo, hi)
                              for lo, hi in _sweep_ranges(total, jobs)]):
            yield from part


def _resolve_props(letters):
    from .model import FrameProperty

    return frozenset(FrameProperty.from_letter(x) for x in letters)


def _frames_in_range(job) -> list:
    n, prop_letters, lo, hi = job
    from .model import has_property

    lists, global_props = generators.admissible_space(n,
                                                      _resolve_props(prop_letters))
    out = []
    for k in range(lo, hi):
        frame = generators.decode_admissible(n, lists, k)
        if all(has_property(frame, p) for p in global_props):
            out.append(frame)
    return out


def _definability_range(job):
    """Check one index range of the background class; first mismatch wins."""
    letter, formula_text, background, n, lo, hi, budget = job
    from .model import FRAME_CLASSES, FrameProperty, has_property

    claim = definability.DefinabilityClaim(
        FrameProperty.from_letter(letter), parse(formula_text), background)
    lists, global_props = generators.admissible_space(
        n, FRAME_CLASSES[background])
    checked = 0
    for k in range(lo, hi):
        frame = generators.decode_admissible(n, lists, k)
        if not all(has_property(frame, p) for p in global_props):
            continue
        checked += 1
        counter = definability.check_frame(claim, frame, budget)
        if counter is not None:
            return checked, counter
    return checked, None


def _parallel_defines(claim, max_states: int, jobs: int,
                      budget: int) -> definability.DefinesResult:
    import concurrent.futures

    checked = 0
    job_args = []
    for n in range(1, max_states + 1):
        lists, _ = generators.admissible_space(
            n, FRAME_CLASSES[claim.background])
        total = 1
        for radix in lists:
            total *= len(radix)
        job_args.extend((claim.prop.value, str(claim.formula),
                         claim.background, n, lo, hi, budget)
                        for lo, hi in _sweep_ranges(total, jobs))
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        for count, counter in pool.map(_definability_range, job_args):
            checked += count
            if counter is not None:
                return definability.DefinesResult(False, checked, counter)
    return definability.DefinesResult(True, checked)


def _audit_range(job):
    """Validity of one axiom instance over one index range of a class."""
    formula_text, class_name, n, lo, hi, budget = job
    from .model import frame_class, has_property
    from .semantics import SemanticsKind, frame_valid

    instance = parse(formula_text)
    lists, global_props = generators.admissible_space(n,
                                                      frame_class(class_name))
    checked = 0
    for k in range(lo, hi):
        frame = generators.decode_admissible(n, lists, k)
        if not all(has_property(frame, p) for p in global_props):
            continue
        checked += 1
        result = frame_valid(frame, instance, SemanticsKind.NEW, budget)
        if not result.valid:
            return checked, (frame, result)
    return checked, None


def _parallel_audit(system, max_states: int, jobs: int,
                    budget: int) -> proofsys.AuditReport:
    import concurrent.futures

    audits = []
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        for name in system.schema_names:
            instance = proofsys.schema_instance(name)
            job_args = []
            for n in range(1, max_states + 1):
                lists, _ = generators.admissible_space(
                    n, FRAME_CLASSES[system.frame_class])
                total = 1
                for radix in lists:
                    total *= len(radix)
                job_args.extend((str(instance), system.frame_class, n, lo, hi,
                                 budget)
                                for lo, hi in _sweep_ranges(total, jobs))
            checked = 0
            counter = None
            for count, found in pool.map(_audit_range, job_args):
                checked += count
                if found is not None and counter is None:
                    counter = found
            audits.append(proofsys.AxiomAudit(name, instance, counter is None,
                                              checked, counter))
    negative = proofsys.filter_equ_witness(max_states, budget)
    return proofsys.AuditReport(system, max_states, tuple(audits), negative)


# ---------------------------------------------------------------------------
# Argument parsing.

def _build_parser() -> argparse.ArgumentParser:
    budget = int(os.environ.get("DELTA_LAB_BUDGET", DEFAULT_BUDGET))
    top = argparse.ArgumentParser(
        prog="delta-lab",
        description="finite-model workbench for non-contingency logic")
    top.add_argument("--format", choices=("human", "json"), default="human")
    top.add_argument("--jobs", type=int, default=1)
    top.add_argument("--budget", type=int, default=budget,
                     help="subset-enumeration budget (bits)")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a formula at a state")
    p.add_argument("--model", required=True)
    p.add_argument("--state", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--semantics", required=True,
                   choices=("old", "new", "kripke"))
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("transform", help="convert a model between presentations")
    p.add_argument("kind",
                   choices=("c-variation", "qf-variation", "qf-to-kripke"))
    p.add_argument("--model", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("bisim", help="check a relation or compute bisimilarity")
    p.add_argument("action", choices=("check", "max"))
    p.add_argument("--kind", required=True,
                   choices=tuple(k.value for k in bisim.BisimKind))
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--pairs", help="pair-relation file (check only)")
    p.set_defaults(func=_cmd_bisim)

    p = sub.add_parser("equiv-partition",
                       help="logical-equivalence blocks of model states")
    p.add_argument("--models", nargs="+", required=True)
    p.add_argument("--vocab", required=True, help="comma-separated atoms")
    p.add_argument("--semantics", default="new",
                   choices=("old", "new", "kripke"))
    p.set_defaults(func=_cmd_equiv_partition)

    p = sub.add_parser("definability", help="verify a definability claim")
    p.add_argument("--builtin", help="property letter from the builtin table")
    p.add_argument("--property")
    p.add_argument("--formula")
    p.add_argument("--background", default="all", choices=("all", "c"))
    p.add_argument("--max-states", type=int, default=2)
    p.set_defaults(func=_cmd_definability)

    p = sub.add_parser("audit", help="axiom soundness sweep")
    p.add_argument("--system", required=True)
    p.add_argument("--max-states", type=int, default=2)
    p.add_argument("--negative", help="named negative claim (filter-deltaequ)")
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("proof-check", help="check a Hilbert-style proof script")
    p.add_argument("--system", required=True)
    p.add_argument("--script", required=True)
    p.set_defaults(func=_cmd_proof_check)

    p = sub.add_parser("countermodel", help="bounded countermodel search")
    p.add_argument("--formula", required=True)
    p.add_argument("--class", dest="klass", default="all")
    p.add_argument("--max-states", type=int, default=2)
    p.set_defaults(func=_cmd_countermodel)

    p = sub.add_parser("enumerate", help="stream frames matching a filter")
    p.add_argument("--kind", choices=("frames", "kripke"), default="frames")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--class", dest="klass", default="")
    p.add_argument("--mode", choices=("exhaustive", "random"),
                   default="exhaustive")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--limit", type=int, default=0)
    p.add_argument("--count-only", action="store_true")
    p.set_defaults(func=_cmd_enumerate)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
