import itertools

from delta_lab.generators import GenSpec, enum_frames, random_model
from delta_lab.model import (FrameProperty, KripkeModel, NeighborhoodModel,
                             classify, has_property, validate)

FP = FrameProperty


def nm(states, fams, val=None):
    return NeighborhoodModel.from_names(states, fams, val)


# --- literal restatements of the property clauses, used as oracles ---------

def subsets(universe):
    out = []
    for k in range(len(universe) + 1):
        out.extend(frozenset(c) for c in itertools.combinations(universe, k))
    return out


def oracle(m, prop):
    states = list(range(m.n))
    fam = [set(x for x in m.neighborhoods[s]) for s in states]
    full = m.full

    def comp(x):
        return full & ~x

    for s in states:
        ns = fam[s]
        if prop is FP.N and full not in ns:
            return False
        if prop is FP.R:
            core = full
            for x in ns:
                core &= x
            if core not in ns:
                return False
        if prop is FP.I:
            for x in ns:
                for y in ns:
                    if x & y not in ns:
                        return False
        if prop is FP.S:
            for x in ns:
                for y in range(full + 1):
                    if x | y == y and y not in ns:
                        return False
        if prop is FP.C:
            for x in ns:
                if comp(x) not in ns:
                    return False
        if prop is FP.D:
            for x in ns:
                if comp(x) in ns:
                    return False
        if prop is FP.T:
            for x in ns:
                if not x >> s & 1:
                    return False
        if prop is FP.B:
            for x in range(full + 1):
                if x >> s & 1:
                    derived = 0
                    for u in states:
                        if comp(x) not in fam[u]:
                            derived |= 1 << u
                    if derived not in ns:
                        return False
        if prop is FP.FOUR:
            for x in ns:
                derived = 0
                for u in states:
                    if x in fam[u]:
                        derived |= 1 << u
                if derived not in ns:
                    return False
        if prop is FP.FIVE:
            for x in range(full + 1):
                if x not in ns:
                    derived = 0
                    for u in states:
                        if x not in fam[u]:
                            derived |= 1 << u
                    if derived not in ns:
                        return False
        if prop is FP.WS:
            for x in ns:
                for y in range(full + 1):
                    for z in range(full + 1):
                        if (x | y) not in ns and (comp(x) | z) not in ns:
                            return False
    return True


def test_single_state_full_pair_family():
    m = nm(["a"], {"a": [[], ["a"]]})
    for prop in (FP.C, FP.N, FP.I, FP.S, FP.R, FP.WS):
        assert has_property(m, prop), prop
    assert not has_property(m, FP.D)
    assert not has_property(m, FP.T)


def test_two_state_empty_and_unit():
    m = nm(["a", "b"], {"a": [[], ["a", "b"]], "b": [[], ["a", "b"]]})
    for prop in (FP.N, FP.I, FP.C, FP.WS):
        assert has_property(m, prop), prop
    assert not has_property(m, FP.S)


def test_single_state_singleton_family():
    m = nm(["a"], {"a": [["a"]]})
    for prop in (FP.S, FP.I, FP.N):
        assert has_property(m, prop), prop
    assert not has_property(m, FP.C)


def test_classify_examples():
    m = nm(["a", "b"], {"a": [[], ["a", "b"]], "b": [[], ["a", "b"]]})
    assert classify(m) == {"c-model", "quasi-filter"}
    powerset = nm(["a"], {"a": [[], ["a"]]})
    assert classify(powerset) == {"c-model", "monotonic-c", "csi", "filter",
                                  "quasi-filter"}
    only_unit = nm(["a"], {"a": [["a"]]})
    assert classify(only_unit) == {"filter"}


def test_has_property_matches_literal_oracle_exhaustively():
    for n in (1, 2):
        for frame in enum_frames(GenSpec(n)):
            for prop in FrameProperty:
                assert has_property(frame, prop) == oracle(frame, prop), (
                    frame, prop)


def test_has_property_matches_literal_oracle_sampled_3_states():
    for seed in range(60):
        m = random_model(GenSpec(3, seed=seed, mode="random"), ["p"])
        for prop in FrameProperty:
            assert has_property(m, prop) == oracle(m, prop), (m, prop)


def test_quasi_filter_iff_component_properties():
    for seed in range(80):
        m = random_model(GenSpec(2, seed=seed, mode="random"), [])
        expected = all(has_property(m, p)
                       for p in (FP.N, FP.I, FP.C, FP.WS))
        assert ("quasi-filter" in classify(m)) == expected


def test_complement_membership_is_biconditional_on_c_models():
    for seed in range(50):
        m = random_model(GenSpec(3, frozenset({FP.C}), seed=seed,
                                 mode="random"), [])
        for fam in m.neighborhoods:
            for x in range(m.full + 1):
                assert (x in fam) == (m.complement(x) in fam)


def test_validate_ok_and_violations():
    m = nm(["a", "b"], {"a": [["a"]], "b": []}, {"p": ["a"]})
    assert validate(m) == []
    broken = NeighborhoodModel(("a",), (frozenset({0b10}),), {"p": 0b1})
    assert any("unknown state" in v for v in validate(broken))
    short = NeighborhoodModel(("a", "b"), (frozenset(),), {})
    assert any("not total" in v for v in validate(short))
    bad_kripke = KripkeModel(("a",), (0b10,), {})
    assert any("unknown state" in v for v in validate(bad_kripke))


def test_from_names_rejects_unknowns_and_duplicates():
    import pytest

    with pytest.raises(ValueError):
        nm(["a"], {"a": [["zz"]]})
    with pytest.raises(ValueError):
        nm(["a", "a"], {"a": []})


def test_validate_empty_state_set():
    assert "empty state set" in validate(NeighborhoodModel((), (), {}))
