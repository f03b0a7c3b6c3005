import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frameness import (
    EmptyState,
    NegativeWeight,
    Ssr,
    SsrMismatch,
    from_json,
    is_gapless,
    is_resource,
    normalize,
    spectrum,
    tensor,
    tensor_all,
)


def test_normalize_examples():
    s = normalize({0: 0.5, 1: 0.5}, "u1")
    assert s.weights == {0: 0.5, 1: 0.5}
    assert normalize({0: 1.0, 1: 1e-15}, "u1").weights == {0: 1.0}
    assert normalize({0: 2.0, 2: 2.0}, "u1").weights == {0: 0.5, 2: 0.5}


def test_normalize_errors():
    with pytest.raises(EmptyState):
        normalize({0: 1e-12}, "u1")
    with pytest.raises(NegativeWeight):
        normalize({0: 0.5, 1: -1e-6}, "u1")
    # tiny negative noise is tolerated and dropped
    assert normalize({0: 1.0, 1: -1e-13}, "u1").weights == {0: 1.0}


def test_spectrum_examples():
    s = normalize({0: 0.5, 2: 0.3, 6: 0.2}, "u1")
    spec = spectrum(s)
    assert spec.labels == (0, 2, 6) and spec.cardinality == 3
    assert spectrum(normalize({5: 1.0}, "u1")).labels == (5,)
    assert spectrum(normalize({0: 0.4, 1: 0.6}, "z2")).cardinality == 2


def test_gapless_examples():
    assert is_gapless(normalize({2: 0.25, 3: 0.25, 4: 0.25, 5: 0.25}, "u1"))
    assert is_gapless(normalize({0: 0.5, 1: 0.5}, "u1"))
    assert not is_gapless(normalize({1: 0.2, 2: 0.2, 4: 0.3, 5: 0.3}, "u1"))
    assert not is_gapless(normalize({1: 0.4, 7: 0.3, 9: 0.3}, "u1"))
    assert is_gapless(normalize({3: 1.0}, "u1"))
    # SU2 gapless means j steps of one, i.e. twice-label steps of two
    assert is_gapless(normalize({0: 0.5, 2: 0.5}, "su2"))
    assert not is_gapless(normalize({0: 0.5, 1: 0.5}, "su2"))


def test_is_resource():
    assert not is_resource(normalize({0: 1.0}, "u1"))
    assert not is_resource(normalize({1: 1.0}, "u1"))
    assert is_resource(normalize({0: 0.3, 1: 0.7}, "u1"))
    assert not is_resource(normalize({0: 1.0}, "su2"))
    assert is_resource(normalize({2: 1.0}, "su2"))


def test_tensor_examples():
    refbit = normalize({0: 0.5, 1: 0.5}, "u1")
    assert tensor(refbit, refbit).weights == {0: 0.25, 1: 0.5, 2: 0.25}
    a = normalize({0: 0.75, 1: 0.25}, "z2")
    b = normalize({0: 0.6, 1: 0.4}, "z2")
    prod = tensor(a, b)
    assert prod.weight(0) == pytest.approx(0.75 * 0.6 + 0.25 * 0.4, abs=1e-15)
    assert prod.weight(1) == pytest.approx(0.75 * 0.4 + 0.25 * 0.6, abs=1e-15)
    stretch = tensor(normalize({2: 1.0}, "su2"), normalize({1: 1.0}, "su2"))
    assert stretch.weights == {3: 1.0}
    with pytest.raises(SsrMismatch):
        tensor(a, refbit)


def test_su2_axis_metadata():
    a = normalize({0: 0.5, 2: 0.5}, "su2", axis="z")
    b = normalize({2: 1.0}, "su2", axis="x")
    with pytest.raises(SsrMismatch):
        tensor(a, b)
    same = normalize({2: 1.0}, "su2", axis="z")
    assert tensor(a, same).axis == "z"
    with pytest.raises(ValueError):
        normalize({0: 1.0}, "u1", axis="z")


def test_json_round_trip():
    s = normalize({0: 1 / 3, 3: 2 / 3}, "su2", axis="lab")
    data = json.dumps(s.to_json())
    again = from_json(data)
    assert again == s
    bare = from_json({"0": 0.5, "1": 0.5}, "u1")
    assert bare.weights == {0: 0.5, 1: 0.5}
    with pytest.raises(ValueError):
        from_json({"0": 1.0})


weight_maps = st.dictionaries(
    st.integers(min_value=0, max_value=10),
    st.floats(min_value=0.01, max_value=1.0),
    min_size=1,
    max_size=5,
)


@given(weight_maps, weight_maps)
@settings(max_examples=100, deadline=None)
def test_tensor_commutes_and_preserves_weight(raw_a, raw_b):
    a = normalize(raw_a, "u1")
    b = normalize(raw_b, "u1")
    ab, ba = tensor(a, b), tensor(b, a)
    assert ab.close_to(ba, 1e-12)
    assert abs(sum(ab.weights.values()) - 1.0) < 1e-12
    assert set(ab.weights) == {x + y for x in a.weights for y in b.weights}


@given(weight_maps, weight_maps, weight_maps)
@settings(max_examples=60, deadline=None)
def test_tensor_associative(raw_a, raw_b, raw_c):
    a, b, c = (normalize(r, "u1") for r in (raw_a, raw_b, raw_c))
    left = tensor(tensor(a, b), c)
    right = tensor(a, tensor(b, c))
    assert left.close_to(right, 1e-12)
    assert left.close_to(tensor_all([a, b, c]), 1e-12)


@given(weight_maps)
@settings(max_examples=100, deadline=None)
def test_normalize_idempotent(raw):
    once = normalize(raw, "u1")
    twice = normalize(once.weights, "u1")
    assert once.close_to(twice, 1e-15)


def test_label_step():
    assert Ssr.U1.label_step == 1 and Ssr.SU2.label_step == 2
