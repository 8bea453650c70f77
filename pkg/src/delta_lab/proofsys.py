"""Hilbert-style axiom systems over the non-contingency language.

Four systems are provided.  E is the minimal one: tautology instances, the
equivalence axiom for negated arguments, and the replacement rule; M adds
distribution of non-contingency over conjunction, R adds the converse, and K
instead adds the unit, conjunction, and disjunction axioms matching Kripke
reasoning.  Modus ponens is a rule of every system.  Soundness is audited by
exhaustive frame sweeps at small sizes, and non-theoremhood by bounded
countermodel search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Sequence

from .formula import (And, Atom, Box, Bot, Delta, Formula, Iff, Imp, Nabla,
                      Not, Or, Top, expand_sugar, metrics, parse)
from .model import BudgetError, NeighborhoodModel
from .semantics import FrameCheck, SemanticsKind, frame_valid


@dataclass(frozen=True)
class Meta(Formula):
    """Schema metavariable; only ever appears inside schema patterns."""
    name: str


_PHI, _PSI, _CHI = Meta("phi"), Meta("psi"), Meta("chi")

SCHEMAS: dict[str, Formula] = {
    "ΔEqu": Iff(Delta(_PHI), Delta(Not(_PHI))),
    "ΔM": Imp(Delta(And(_PHI, _PSI)), And(Delta(_PHI), Delta(_PSI))),
    "ΔC": Imp(And(Delta(_PHI), Delta(_PSI)), Delta(And(_PHI, _PSI))),
    "ΔTop": Delta(Top()),
    "ΔCon": Imp(And(Delta(_PHI), Delta(_PSI)), Delta(And(_PHI, _PSI))),
    "ΔDis": Imp(Delta(_PHI),
                Or(Delta(Imp(_PHI, _PSI)), Delta(Imp(Not(_PHI), _CHI)))),
}


class AxiomSystem(Enum):
    E = "E"
    M = "M"
    R = "R"
    K = "K"

    @property
    def schema_names(self) -> tuple[str, ...]:
        return {
            AxiomSystem.E: ("ΔEqu",),
            AxiomSystem.M: ("ΔEqu", "ΔM"),
            AxiomSystem.R: ("ΔEqu", "ΔM", "ΔC"),
            AxiomSystem.K: ("ΔEqu", "ΔTop", "ΔCon", "ΔDis"),
        }[self]

    @property
    def frame_class(self) -> str:
        return {
            AxiomSystem.E: "c",
            AxiomSystem.M: "cs",
            AxiomSystem.R: "csi",
            AxiomSystem.K: "quasi-filter",
        }[self]


def match_schema(schema: Formula, f: Formula) -> dict[str, Formula] | None:
    """Substitution of metavariables making the schema equal ``f``, or None."""
    binding: dict[str, Formula] = {}

    def walk(pat: Formula, got: Formula) -> bool:
        if isinstance(pat, Meta):
            seen = binding.get(pat.name)
            if seen is None:
                binding[pat.name] = got
                return True
            return seen == got
        if type(pat) is not type(got):
            return False
        if isinstance(pat, Atom):
            return pat.name == got.name
        if isinstance(pat, (Top, Bot)):
            return True
        if isinstance(pat, (Not, Delta, Nabla, Box)):
            return walk(pat.child, got.child)
        return walk(pat.left, got.left) and walk(pat.right, got.right)

    return binding if walk(schema, f) else None


def instantiate(schema: Formula, binding: dict[str, Formula]) -> Formula:
    if isinstance(schema, Meta):
        return binding[schema.name]
    if isinstance(schema, (Atom, Top, Bot)):
        return schema
    if isinstance(schema, (Not, Delta, Nabla, Box)):
        return type(schema)(instantiate(schema.child, binding))
    return type(schema)(instantiate(schema.left, binding),
                        instantiate(schema.right, binding))


_TAUT_ATOM_BUDGET = 20


def is_taut_instance(f: Formula, atom_budget: int = _TAUT_ATOM_BUDGET) -> bool:
    """Propositional tautology after abstracting each maximal modal subformula
    to a fresh atom (equal subformulas share one atom)."""
    core = expand_sugar(f)
    table: dict[Formula, int] = {}

    def abstract(g: Formula) -> Formula:
        cls = type(g)
        if cls in (Delta, Box):
            if g not in table:
                table[g] = len(table)
            return Atom(f"#{table[g]}")
        if cls is Not:
            return Not(abstract(g.child))
        if cls is And:
            return And(abstract(g.left), abstract(g.right))
        return g

    skeleton = abstract(core)
    names = sorted(metrics(skeleton).vars)
    if len(names) > atom_budget:
        raise BudgetError(f"abstraction yields {len(names)} atoms, "
                          f"budget is {atom_budget}")

    def truth(g: Formula, row: dict[str, bool]) -> bool:
        cls = type(g)
        if cls is Atom:
            return row[g.name]
        if cls is Top:
            return True
        if cls is Not:
            return not truth(g.child, row)
        return truth(g.left, row) and truth(g.right, row)

    for values in itertools.product((False, True), repeat=len(names)):
        if not truth(skeleton, dict(zip(names, values))):
            return False
    return True


@dataclass(frozen=True)
class ProofLine:
    formula: Formula
    by: str


ProofScript = Sequence[ProofLine]


@dataclass(frozen=True)
class ProofVerdict:
    ok: bool
    line: int | None = None  # 1-based first invalid line
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _parse_refs(parts: list[str], count: int, upto: int) -> list[int] | str:
    if len(parts) != count:
        return "wrong number of line references"
    refs = []
    for part in parts:
        if not part.isdigit() or not 1 <= int(part) <= upto:
            return f"bad line reference {part!r}"
        refs.append(int(part))
    return refs


def check_proof(system: AxiomSystem, script: ProofScript) -> ProofVerdict:
    """Validate every line as a tautology instance, a schema instance of the
    system, modus ponens, or replacement from an earlier biconditional."""
    if not script:
        raise ValueError("empty proof script")
    for no, line in enumerate(script, start=1):
        reason = _check_line(system, script, no, line)
        if reason is not None:
            return ProofVerdict(False, no, reason)
    return ProofVerdict(True)


def _check_line(system: AxiomSystem, script: ProofScript, no: int,
                line: ProofLine) -> str | None:
    by = line.by.strip()
    if by == "TAUT":
        if not is_taut_instance(line.formula):
            return "not a tautology instance"
        return None
    if by in SCHEMAS:
        if by not in system.schema_names:
            return f"schema {by} is not part of {system.value}"
        if match_schema(SCHEMAS[by], line.formula) is None:
            return f"not an instance of {by}"
        return None
    parts = by.split()
    if parts and parts[0] == "MP":
        refs = _parse_refs(parts[1:], 2, no - 1)
        if isinstance(refs, str):
            return refs
        minor, major = script[refs[0] - 1].formula, script[refs[1] - 1].formula
        if major != Imp(minor, line.formula):
            return "major premise is not (minor -> conclusion)"
        return None
    if parts and parts[0] == "REΔ":
        refs = _parse_refs(parts[1:], 1, no - 1)
        if isinstance(refs, str):
            return refs
        premise = script[refs[0] - 1].formula
        if not isinstance(premise, Iff):
            return "premise is not a biconditional"
        if line.formula != Iff(Delta(premise.left), Delta(premise.right)):
            return "conclusion does not apply Δ to both sides of the premise"
        return None
    return f"unknown justification {by!r}"


def load_script(path) -> list[ProofLine]:
    """Read a proof script: a JSON array of {"formula": ..., "by": ...}."""
    import json

    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    return [ProofLine(parse(line["formula"]), line["by"]) for line in raw]


def sample_scripts() -> dict[str, list[ProofLine]]:
    """The derivations shipped with the package, all checkable in system K."""
    from importlib import resources

    out = {}
    root = resources.files(__package__) / "proofs"
    for entry in sorted(root.iterdir()):
        if entry.name.endswith(".json"):
            import json

            raw = json.loads(entry.read_text(encoding="utf-8"))
            out[entry.name.removesuffix(".json")] = [
                ProofLine(parse(line["formula"]), line["by"]) for line in raw]
    return out


# ---------------------------------------------------------------------------
# Bounded audits.

_FRESH = ("p", "q", "r")


def schema_instance(name: str) -> Formula:
    """The schema with distinct fresh atoms substituted for metavariables."""
    binding = {meta: Atom(_FRESH[i])
               for i, meta in enumerate(("phi", "psi", "chi"))}
    return instantiate(SCHEMAS[name], binding)


@dataclass(frozen=True)
class AxiomAudit:
    name: str
    formula: Formula
    valid: bool
    frames_checked: int
    counterexample: tuple[NeighborhoodModel, FrameCheck] | None = None


@dataclass(frozen=True)
class AuditReport:
    system: AxiomSystem
    max_states: int
    axioms: tuple[AxiomAudit, ...]
    negative_witness: tuple[NeighborhoodModel, FrameCheck] | None

    @property
    def ok(self) -> bool:
        return all(a.valid for a in self.axioms)


def _class_frames(class_name: str, max_states: int) -> Iterator[NeighborhoodModel]:
    from .generators import GenSpec, enum_frames
    from .model import frame_class

    props = frame_class(class_name)
    for n in range(1, max_states + 1):
        yield from enum_frames(GenSpec(n_states=n, properties=props))


def audit_soundness(system: AxiomSystem, max_states: int = 2,
                    max_bits: int = 24) -> AuditReport:
    """Sweep every frame of the system's class up to ``max_states`` against a
    fresh-atom instance of each axiom schema.  The report also carries the
    standing negative result: the smallest filter frame (monotone, closed
    under intersections, containing the unit, but not under complements)
    falsifying the ΔEqu instance, showing the equivalence axiom is unsound on
    filters."""
    audits = []
    for name in system.schema_names:
        instance = schema_instance(name)
        checked = 0
        counter = None
        for frame in _class_frames(system.frame_class, max_states):
            checked += 1
            result = frame_valid(frame, instance, SemanticsKind.NEW, max_bits)
            if not result.valid:
                counter = (frame, result)
                break
        audits.append(AxiomAudit(name, instance, counter is None, checked,
                                 counter))
    negative = filter_equ_witness(max_states, max_bits)
    return AuditReport(system, max_states, tuple(audits), negative)


def filter_equ_witness(max_states: int = 1, max_bits: int = 24,
                       ) -> tuple[NeighborhoodModel, FrameCheck] | None:
    """First filter frame with at most ``max_states`` states falsifying the
    ΔEqu instance, if any."""
    instance = schema_instance("ΔEqu")
    for frame in _class_frames("filter", max_states):
        result = frame_valid(frame, instance, SemanticsKind.NEW, max_bits)
        if not result.valid:
            return frame, result
    return None


def countermodel_search(f: Formula, class_name: str, max_states: int = 2,
                        max_bits: int = 24,
                        ) -> tuple[NeighborhoodModel, str] | None:
    """A model of the class with at most ``max_states`` states and a state
    falsifying ``f``, or None if the bounded search is exhausted.  Never a
    validity claim."""
    for frame in _class_frames(class_name, max_states):
        result = frame_valid(frame, f, SemanticsKind.NEW, max_bits)
        if not result.valid:
            return frame.with_valuation(result.valuation), result.state
    return None
