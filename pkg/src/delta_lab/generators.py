"""Exhaustive and seeded-random generation of frames, models, and formulas.

Exhaustive neighborhood enumeration encodes each state's family as an integer
over 2^(2^n) (bit k set iff subset-mask k belongs to the family) and walks
the n-tuple of codes in ascending order, so frame #k is reproducible from
(n, k) and filtered counts are stable.  Random generation is deterministic
per seed; constrained sampling draws per-state families from the precomputed
admissible lists at small sizes and falls back to closure-then-check above
that.  Distribution shape is not a contract.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

from .formula import (And, Atom, Box, Bot, Delta, Formula, Iff, Imp, Nabla,
                      Not, Or, Top)
from .model import (LOCAL_PROPERTIES, BudgetError, FrameProperty, KripkeModel,
                    NeighborhoodModel, family_satisfies, has_property)

MAX_EXHAUSTIVE_NBH = 3
MAX_EXHAUSTIVE_KRIPKE = 4
_PRECOMPUTE_LIMIT = 4     # 2^(2^4) = 65536 family codes is still cheap
_RETRY_LIMIT = 10_000


class GenerationError(RuntimeError):
    """Constrained random generation ran out of retries."""


@dataclass(frozen=True)
class GenSpec:
    """What to generate: size, property filter, mode, and determinism knobs."""

    n_states: int
    properties: frozenset[FrameProperty] = frozenset()
    seed: int = 0
    mode: str = "exhaustive"
    count: int = 10


def state_names(n: int) -> tuple[str, ...]:
    return tuple(f"s{i}" for i in range(n))


def _family_of_code(code: int, n_subsets: int) -> frozenset[int]:
    return frozenset(k for k in range(n_subsets) if code >> k & 1)


def frame_from_codes(n: int, codes: Sequence[int]) -> NeighborhoodModel:
    n_subsets = 1 << n
    fams = tuple(_family_of_code(code, n_subsets) for code in codes)
    return NeighborhoodModel(state_names(n), fams)


def frame_at(n: int, index: int) -> NeighborhoodModel:
    """Frame #index of the raw (unfiltered) exhaustive stream at n states."""
    base = 1 << (1 << n)
    codes = []
    for _ in range(n):
        index, code = divmod(index, base)
        codes.append(code)
    if index:
        raise ValueError("index out of range")
    return frame_from_codes(n, tuple(reversed(codes)))


@lru_cache(maxsize=None)
def _admissible_codes(n: int, props: frozenset[FrameProperty],
                      state: int) -> tuple[int, ...]:
    """Family codes whose family satisfies every local property, ascending."""
    n_subsets = 1 << n
    full = n_subsets - 1
    out = []
    for code in range(1 << n_subsets):
        fam = _family_of_code(code, n_subsets)
        if all(family_satisfies(p, fam, full, state) for p in props):
            out.append(code)
    return tuple(out)


def _split_props(props: Iterable[FrameProperty]
                 ) -> tuple[frozenset[FrameProperty], frozenset[FrameProperty]]:
    props = frozenset(props)
    local = props & LOCAL_PROPERTIES
    return local, props - local


def admissible_space(n: int, properties: Iterable[FrameProperty]
                     ) -> tuple[list[tuple[int, ...]], frozenset[FrameProperty]]:
    """Per-state admissible family codes for the local properties, plus the
    global properties a consumer still has to check per frame.  The product
    of the lists is index-addressable, so sweeps partition cleanly."""
    local, global_props = _split_props(properties)
    return [_admissible_codes(n, local, s) for s in range(n)], global_props


def decode_admissible(n: int, lists: list[tuple[int, ...]],
                      index: int) -> NeighborhoodModel:
    """Frame #index of the product of per-state admissible code lists,
    matching the order of ``enum_frames`` under the same filter."""
    codes = []
    for radix in reversed(lists):
        index, at = divmod(index, len(radix))
        codes.append(radix[at])
    if index:
        raise ValueError("index out of range")
    return frame_from_codes(n, tuple(reversed(codes)))


def enum_frames(spec: GenSpec) -> Iterator[NeighborhoodModel]:
    """Stream of neighborhood frames matching the property filter.

    Exhaustive mode yields each matching frame exactly once, codes ascending;
    random mode yields ``spec.count`` seed-deterministic samples.
    """
    if spec.mode == "random":
        rnd = random.Random(spec.seed)
        for _ in range(spec.count):
            yield _random_frame(spec.n_states, spec.properties, rnd)
        return
    n = spec.n_states
    if n > MAX_EXHAUSTIVE_NBH:
        raise BudgetError(
            f"exhaustive neighborhood enumeration is limited to "
            f"{MAX_EXHAUSTIVE_NBH} states, got {n}")
    per_state, global_props = admissible_space(n, spec.properties)
    for codes in itertools.product(*per_state):
        frame = frame_from_codes(n, codes)
        if all(has_property(frame, p) for p in global_props):
            yield frame


def enum_kripke_frames(spec: GenSpec) -> Iterator[KripkeModel]:
    """Every Kripke frame at the given size, successor codes ascending."""
    n = spec.n_states
    if n > MAX_EXHAUSTIVE_KRIPKE:
        raise BudgetError(
            f"exhaustive Kripke enumeration is limited to "
            f"{MAX_EXHAUSTIVE_KRIPKE} states, got {n}")
    names = state_names(n)
    for succ in itertools.product(range(1 << n), repeat=n):
        yield KripkeModel(names, succ)


def _random_family(n: int, props: frozenset[FrameProperty],
                   rnd: random.Random) -> frozenset[int]:
    """A random family closed under whatever (n)/(c)/(s) require; the caller
    verifies the remaining properties and retries."""
    full = (1 << n) - 1
    fam = {rnd.getrandbits(n) for _ in range(rnd.randrange(0, n + 3))}
    if FrameProperty.N in props:
        fam.add(full)
    # Complement and superset closures feed each other; iterate to fixpoint.
    changed = True
    while changed:
        changed = False
        if FrameProperty.C in props:
            extra = {full & ~x for x in fam} - fam
            if extra:
                fam |= extra
                changed = True
        if FrameProperty.S in props:
            extra = set()
            for x in fam:
                rest = full & ~x
                sub = rest
                while True:
                    if (x | sub) not in fam:
                        extra.add(x | sub)
                    if sub == 0:
                        break
                    sub = (sub - 1) & rest
            if extra:
                fam |= extra
                changed = True
    return frozenset(fam)


def _random_frame(n: int, props: frozenset[FrameProperty],
                  rnd: random.Random) -> NeighborhoodModel:
    local, global_props = _split_props(props)
    use_precomputed = n <= _PRECOMPUTE_LIMIT
    for _ in range(_RETRY_LIMIT):
        if use_precomputed:
            codes = []
            ok = True
            for s in range(n):
                admissible = _admissible_codes(n, local, s)
                if not admissible:
                    ok = False
                    break
                codes.append(rnd.choice(admissible))
            if not ok:
                raise GenerationError(
                    f"no {n}-state family satisfies {sorted(p.value for p in local)}")
            frame = frame_from_codes(n, codes)
        else:
            fams = tuple(_random_family(n, local, rnd) for _ in range(n))
            frame = NeighborhoodModel(state_names(n), fams)
            if not all(family_satisfies(p, fam, frame.full, s)
                       for p in local
                       for s, fam in enumerate(frame.neighborhoods)):
                continue
        if all(has_property(frame, p) for p in global_props):
            return frame
    raise GenerationError(
        f"filter {sorted(p.value for p in props)} rejected "
        f"{_RETRY_LIMIT} candidates at {n} states")


def random_model(spec: GenSpec, atoms: Sequence[str]) -> NeighborhoodModel:
    """Seed-deterministic random model whose frame passes the filter."""
    rnd = random.Random(spec.seed)
    frame = _random_frame(spec.n_states, spec.properties, rnd)
    valuation = {p: rnd.getrandbits(spec.n_states) for p in atoms}
    return frame.with_valuation(valuation)


def random_kripke(spec: GenSpec, atoms: Sequence[str]) -> KripkeModel:
    """Seed-deterministic random Kripke model."""
    rnd = random.Random(spec.seed)
    n = spec.n_states
    succ = tuple(rnd.getrandbits(n) for _ in range(n))
    valuation = {p: rnd.getrandbits(n) for p in atoms}
    return KripkeModel(state_names(n), succ, valuation)


_LEAF = ("atom", "atom", "atom", "top", "bot")
_SPREAD = ("not", "and", "and", "or", "imp", "iff")
_MODAL = ("delta", "delta", "nabla")


def random_formula(depth: int, atoms: Sequence[str], seed: int,
                   include_box: bool = False, size: int = 14) -> Formula:
    """Seed-deterministic formula with modal depth at most ``depth``."""
    rnd = random.Random(seed)
    atoms = list(atoms)

    def gen(d: int, budget: int) -> Formula:
        pool = _LEAF
        if budget > 1:
            pool = pool + _SPREAD
            if d > 0:
                pool = pool + _MODAL + (("box",) if include_box else ())
        kind = rnd.choice(pool)
        if kind == "atom":
            return Atom(rnd.choice(atoms)) if atoms else Top()
        if kind == "top":
            return Top()
        if kind == "bot":
            return Bot()
        if kind == "not":
            return Not(gen(d, budget - 1))
        if kind == "delta":
            return Delta(gen(d - 1, budget - 1))
        if kind == "nabla":
            return Nabla(gen(d - 1, budget - 1))
        if kind == "box":
            return Box(gen(d - 1, budget - 1))
        left = gen(d, (budget - 1) // 2)
        right = gen(d, budget - 1 - (budget - 1) // 2)
        if kind == "and":
            return And(left, right)
        if kind == "or":
            return Or(left, right)
        if kind == "imp":
            return Imp(left, right)
        return Iff(left, right)

    return gen(depth, max(size, 1))
