from delta_lab.definability import (DefinabilityClaim, builtin_claim,
                                    builtin_table, check_frame, defines)
from delta_lab.formula import parse
from delta_lab.generators import GenSpec, enum_frames
from delta_lab.model import FrameProperty, NeighborhoodModel
from delta_lab.semantics import SemanticsKind

FP = FrameProperty

EXPECTED = {
    "n": ("D top", "c"),
    "i": ("D p & D q -> D(p & q)", "c"),
    "s": ("D(p & q) -> D p & D q", "c"),
    "c": ("D p <-> D ~p", "all"),
    "d": ("N p", "c"),
    "t": ("D p -> p", "c"),
    "b": ("p -> D N p", "c"),
    "4": ("D p -> D D p", "c"),
    "5": ("N p -> D N p", "c"),
    "ws": ("D p -> D(p -> q) | D(~p -> r)", "all"),
}


def test_builtin_table_contents():
    table = builtin_table()
    assert len(table) == 10
    by_prop = {claim.prop.value: claim for claim in table}
    assert set(by_prop) == set(EXPECTED)
    for letter, (text, background) in EXPECTED.items():
        claim = by_prop[letter]
        assert claim.formula == parse(text), letter
        assert claim.background == background, letter
        assert claim.semantics is SemanticsKind.NEW
    assert "r" not in by_prop  # no defining formula is shipped for (r)


def test_t_claim_uses_c_background():
    claim = builtin_claim("t")
    assert claim.background == "c"
    assert claim.formula == parse("D p -> p")


def test_c_claim_confirmed_exhaustively_two_states():
    result = defines(builtin_claim("c"), max_states=2)
    assert result.confirmed
    assert result.frames_checked == 4 + 256


def test_all_claims_confirmed_exhaustively_one_state():
    for claim in builtin_table():
        assert defines(claim, max_states=1).confirmed, claim.prop


def test_d_claim_background_sensitivity():
    # Over all frames the claim fails: one-state frames exist that have (d)
    # yet make contingency refutable.
    wrong = DefinabilityClaim(FP.D, parse("N p"), "all")
    result = defines(wrong, max_states=1)
    assert not result.confirmed
    counter = result.counterexample
    assert counter.direction == "property-without-validity"
    assert counter.witness is not None and not counter.witness.valid
    # the singleton-neighborhood frame is such a mismatch as well
    singleton = NeighborhoodModel.from_names(["s"], {"s": [["s"]]})
    found = check_frame(wrong, singleton)
    assert found is not None
    assert found.direction == "property-without-validity"


def test_check_frame_single():
    frame = NeighborhoodModel.from_names(["s"], {"s": [["s"]]})
    # neither (c) nor its formula hold here, so the biconditional stands
    assert check_frame(builtin_claim("c"), frame) is None
    # (d) holds but contingency is refutable
    wrong = DefinabilityClaim(FP.D, parse("N p"), "all")
    assert check_frame(wrong, frame) is not None


def test_counterexamples_persist_at_larger_bounds():
    wrong = DefinabilityClaim(FP.D, parse("N p"), "all")
    small = defines(wrong, max_states=1)
    large = defines(wrong, max_states=2)
    assert not small.confirmed and not large.confirmed
    assert large.counterexample.frame == small.counterexample.frame


def test_defines_accepts_explicit_frame_stream():
    frames = list(enum_frames(GenSpec(1, frozenset({FP.C}))))
    result = defines(builtin_claim("c"), frames=frames)
    assert result.confirmed and result.frames_checked == len(frames)
