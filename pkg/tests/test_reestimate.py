"""Entity re-estimation tests: the four signals and their fusion."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import e, o
from tabkg.reestimate import (
    EntitySignalBundle,
    NeighborCell,
    abbreviation_match,
    reestimate,
    row_context_distribution,
    signal_row_context,
    signal_string_similarity,
    signal_type_consistency,
)


# -- signal_type_consistency -----------------------------------------------------


def test_single_overlapping_candidate(tiny_kg):
    dist = signal_type_consistency(
        {e("Tokyo"): 1.0}, {o("City"): 0.7, o("Place"): 0.3}, tiny_kg
    )
    assert dist == {e("Tokyo"): 1.0}


def test_type_consistency_ratio(tiny_kg):
    col_types = {o("City"): 0.6, o("Country"): 0.2}
    dist = signal_type_consistency(
        {e("Tokyo"): 0.5, e("Japan"): 0.5}, col_types, tiny_kg
    )
    assert dist[e("Tokyo")] == pytest.approx(0.75)
    assert dist[e("Japan")] == pytest.approx(0.25)


def test_type_consistency_best_type_wins(tiny_kg):
    # a candidate picks its best-scoring type, not the sum
    col_types = {o("City"): 0.3, o("Place"): 0.5}
    dist = signal_type_consistency({e("Tokyo"): 1.0}, col_types, tiny_kg)
    assert dist == {e("Tokyo"): 1.0}


def test_type_consistency_empty_types(tiny_kg):
    assert signal_type_consistency({e("Tokyo"): 1.0}, {}, tiny_kg) == {}


# -- signal_string_similarity ------------------------------------------------------


def test_exact_label_scores_one(tiny_kg):
    dist = signal_string_similarity({e("Tokyo"): 1.0}, "Tokyo", tiny_kg)
    assert dist == {e("Tokyo"): 1.0}


def test_initials_abbreviation_fires(tiny_kg):
    assert abbreviation_match("USA", "United States of America")
    dist = signal_string_similarity(
        {e("USA"): 0.5, e("Japan"): 0.5}, "USA", tiny_kg
    )
    # USA gets mean(lev, 1); Japan only its (0) lev score
    assert dist.get(e("USA"), 0) > dist.get(e("Japan"), 0)
    assert e("USA") in dist


def test_abbreviation_rules():
    assert abbreviation_match("USA", "United States of America")
    assert not abbreviation_match("USB", "United States of America")
    assert abbreviation_match("Smith", "Dr. Smith")  # honorific stripped
    assert abbreviation_match("2020-05-01", "1 May 2020")
    assert abbreviation_match("May 1, 2020", "2020-05-01")
    assert not abbreviation_match("abc", "abc")  # no rule fires on plain equality


def test_dissimilar_label_scores_zero():
    from tabkg.kg import KnowledgeGraph

    graph = KnowledgeGraph.from_lines(
        [f'<{e("abc")}> <http://www.w3.org/2000/01/rdf-schema#label> "abc" .']
    )
    dist = signal_string_similarity({e("abc"): 1.0}, "xyz", graph)
    assert e("abc") not in dist  # zero raw mass drops out


# -- signal_row_context ----------------------------------------------------------------


def test_row_context_exact_attribute(tiny_kg):
    neighbors = [NeighborCell("literal", "13929286")]
    assert signal_row_context(e("Tokyo"), neighbors, tiny_kg) == 1.0


def test_row_context_mean_of_columns(tiny_kg):
    neighbors = [
        NeighborCell("literal", "13929286"),  # exact population -> 1.0
        NeighborCell("literal", "6964643"),   # half the population -> 0.5
    ]
    assert signal_row_context(e("Tokyo"), neighbors, tiny_kg) == pytest.approx(0.75)


def test_row_context_entity_link(tiny_kg):
    neighbors = [NeighborCell("entity", "Japan", {e("Japan"): 1.0})]
    assert signal_row_context(e("Tokyo"), neighbors, tiny_kg) == 1.0
    neighbors = [NeighborCell("entity", "France", {e("France"): 1.0})]
    assert signal_row_context(e("Tokyo"), neighbors, tiny_kg) == 0.0


def test_row_context_no_attributes(tiny_kg):
    neighbors = [NeighborCell("literal", "42")]
    assert signal_row_context("http://nowhere/x", neighbors, tiny_kg) == 0.0


def test_row_context_distribution_normalizes(tiny_kg):
    neighbors = [NeighborCell("literal", "13929286")]
    dist = row_context_distribution(
        {e("Tokyo"): 0.5, e("Osaka"): 0.5}, neighbors, tiny_kg
    )
    assert sum(dist.values()) == pytest.approx(1.0)
    assert dist[e("Tokyo")] > dist[e("Osaka")]


def test_row_context_no_neighbors(tiny_kg):
    assert row_context_distribution({e("Tokyo"): 1.0}, [], tiny_kg) == {}


# -- reestimate -------------------------------------------------------------------------


def test_only_lookup_signal_passthrough():
    s7 = {"e1": 0.6, "e2": 0.4}
    bundle = EntitySignalBundle(s7=s7, s8={}, s9={}, s10={})
    out = reestimate(bundle)
    for key, value in s7.items():
        assert out[key] == pytest.approx(value)


def test_hand_computed_two_signals():
    bundle = EntitySignalBundle(
        s7={"e1": 0.6, "e2": 0.4}, s8={}, s9={"e1": 1.0}, s10={}
    )
    out = reestimate(bundle)
    assert out["e1"] == pytest.approx(0.8)
    assert out["e2"] == pytest.approx(0.2)


def test_all_weight_on_string_signal():
    bundle = EntitySignalBundle(
        s7={"e1": 0.6, "e2": 0.4},
        s8={},
        s9={"e1": 0.9, "e2": 0.1},
        s10={},
        weights=(0.0, 0.0, 1.0, 0.0),
    )
    out = reestimate(bundle)
    assert out == {"e1": 0.9, "e2": 0.1}


def test_empty_lookup_stays_unannotated():
    bundle = EntitySignalBundle(s7={}, s8={"e1": 1.0}, s9={"e1": 1.0}, s10={})
    assert reestimate(bundle) == {}


def test_candidates_outside_lookup_never_gain_mass():
    bundle = EntitySignalBundle(
        s7={"e1": 1.0}, s8={"e2": 1.0}, s9={}, s10={}
    )
    out = reestimate(bundle)
    assert set(out) == {"e1"}


dists = st.dictionaries(
    st.sampled_from(["e1", "e2", "e3"]),
    st.floats(min_value=0.01, max_value=1.0),
    min_size=1,
    max_size=3,
).map(lambda d: {k: v / s for s in [sum(d.values())] for k, v in d.items()})


@settings(max_examples=200, deadline=None)
@given(dists, st.floats(min_value=0.1, max_value=20.0))
def test_single_surviving_signal_identity(s7, scale):
    bundle = EntitySignalBundle(
        s7=s7, s8={}, s9={}, s10={}, weights=(scale, scale, scale, scale)
    )
    out = reestimate(bundle)
    assert set(out) == set(s7)
    for key in s7:
        assert out[key] == pytest.approx(s7[key], rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(dists, dists, st.floats(min_value=0.1, max_value=20.0))
def test_argmax_invariant_under_weight_scaling(s7, s9, scale):
    base = reestimate(EntitySignalBundle(s7=s7, s8={}, s9=s9, s10={}))
    scaled = reestimate(
        EntitySignalBundle(
            s7=s7, s8={}, s9=s9, s10={}, weights=(scale, scale, scale, scale)
        )
    )
    best_base = {k for k, v in base.items() if v == max(base.values())}
    best_scaled = {k for k, v in scaled.items() if v == max(scaled.values())}
    assert best_base == best_scaled
