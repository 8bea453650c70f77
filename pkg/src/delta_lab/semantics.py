"""Truth evaluation under the two neighborhood semantics and Kripke semantics.

``OLD`` reads non-contingency as "the extension or its complement is a
neighborhood", ``NEW`` as "the extension is a neighborhood", ``KRIPKE`` as
"all successors agree on the extension".  Extensions are computed bottom-up
once per subformula, so one evaluation is linear in formula size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum

from .formula import And, Atom, Delta, Formula, Not, Top, expand_sugar, metrics
from .model import BudgetError, KripkeModel, NeighborhoodModel, bits


class SemanticsKind(Enum):
    OLD = "old"
    NEW = "new"
    KRIPKE = "kripke"


Model = NeighborhoodModel | KripkeModel


def _check_kind(m: Model, kind: SemanticsKind) -> None:
    if isinstance(m, KripkeModel) != (kind is SemanticsKind.KRIPKE):
        raise ValueError(
            f"semantics {kind.value!r} does not apply to {type(m).__name__}")


def delta_holds(m: Model, state: int, ext: int, kind: SemanticsKind) -> bool:
    """The non-contingency clause of ``kind`` at one state, for a raw extension."""
    if kind is SemanticsKind.KRIPKE:
        r = m.succ[state]
        return r & ext == r or r & ext == 0
    if kind is SemanticsKind.NEW:
        return ext in m.neighborhoods[state]
    return (ext in m.neighborhoods[state]
            or (m.full & ~ext) in m.neighborhoods[state])


def box_holds(m: Model, state: int, ext: int, kind: SemanticsKind) -> bool:
    """The necessity clause at one state."""
    if kind is SemanticsKind.KRIPKE:
        r = m.succ[state]
        return r & ext == r
    return ext in m.neighborhoods[state]


def extension(m: Model, f: Formula, kind: SemanticsKind) -> int:
    """Bitmask of the states where ``f`` is true."""
    _check_kind(m, kind)
    full = m.full
    memo: dict[Formula, int] = {}

    def ext(g: Formula) -> int:
        got = memo.get(g)
        if got is not None:
            return got
        cls = type(g)
        if cls is Atom:
            out = m.atom_mask(g.name)
        elif cls is Top:
            out = full
        elif cls is Not:
            out = full & ~ext(g.child)
        elif cls is And:
            out = ext(g.left) & ext(g.right)
        elif cls is Delta:
            child = ext(g.child)
            out = 0
            for s in range(len(m.states)):
                if delta_holds(m, s, child, kind):
                    out |= 1 << s
        else:  # Box
            child = ext(g.child)
            out = 0
            for s in range(len(m.states)):
                if box_holds(m, s, child, kind):
                    out |= 1 << s
        memo[g] = out
        return out

    return ext(expand_sugar(f))


def evaluate(m: Model, state: str, f: Formula, kind: SemanticsKind) -> bool:
    """Truth of ``f`` at the named state."""
    return bool(extension(m, f, kind) >> m.index(state) & 1)


@dataclass(frozen=True)
class FrameCheck:
    """Outcome of a frame-validity sweep; falsy iff a witness was found."""

    valid: bool
    valuation: dict[str, int] | None = None
    state: str | None = None

    def __bool__(self) -> bool:
        return self.valid


def frame_valid(frame: Model, f: Formula, kind: SemanticsKind,
                max_bits: int = 24) -> FrameCheck:
    """Validity of ``f`` on the frame: every valuation of vars(f), every state.

    Each variable ranges over all subsets of the state set, so the sweep has
    2^(|S| * |vars|) valuations; sweeps beyond ``max_bits`` exponent bits are
    refused.  Returns the first falsifying valuation and state otherwise.
    """
    _check_kind(frame, kind)
    names = sorted(metrics(f).vars)
    n = len(frame.states)
    if len(names) * n > max_bits:
        raise BudgetError(
            f"valuation sweep needs 2^{len(names) * n} cases, budget is 2^{max_bits}")
    full = frame.full
    for masks in itertools.product(range(full + 1), repeat=len(names)):
        valuation = dict(zip(names, masks))
        got = extension(frame.with_valuation(valuation), f, kind)
        if got != full:
            state = next(bits(full & ~got))
            return FrameCheck(False, valuation, frame.states[state])
    return FrameCheck(True)
