"""Verification layer: rechecks, dimension rows, published listings,
minimality probes, and fault injection proving the rechecks can fail."""

import copy
from fractions import Fraction

import pytest

import zetaforge.verify as verify_mod
from zetaforge.verify import (
    MINIMALITY_CAP,
    basis_report,
    dimension_report,
    minimal_depth_stats,
    monomial_count,
    published_basis_check,
    recheck_relations,
    relation_descriptors,
    relation_residual,
)


# ----------------------------------------------------------------- rechecks

def test_recheck_passes_exhaustively_small_weights(tables8):
    all_kinds = ("stuffle", "shuffle", "hoffman", "duality")
    for w in range(3, 9):
        rep = recheck_relations(w, tables8, all_kinds)
        assert rep.passed, rep.failures
        assert rep.draws is None
        assert rep.distinct_checked == sum(rep.population.values())


def test_recheck_population_structure(tables8):
    descs = relation_descriptors(8)
    pop = {}
    for d in descs:
        pop[d[0]] = pop.get(d[0], 0) + 1
    assert pop == {"stuffle": 42, "shuffle": 42, "hoffman": 32}
    assert len(set(descs)) == len(descs)


def test_recheck_sampling_is_seeded_and_memoized(tables8):
    rep1 = recheck_relations(7, tables8, sample=50, seed=123)
    rep2 = recheck_relations(7, tables8, sample=50, seed=123)
    assert rep1.draws == rep2.draws == 50
    assert rep1.distinct_checked == rep2.distinct_checked <= 50
    assert rep1.passed


def test_recheck_catches_injected_fault(tables8):
    # perturb one stored coefficient: rechecks must notice, naming an origin
    broken = copy.deepcopy(tables8)
    entry = broken[8].entries[(6, 2)]
    key = next(iter(entry))
    entry[key] += Fraction(1, 7)
    rep = recheck_relations(8, broken)
    assert not rep.passed
    assert any("Z(" in f for f in rep.failures)


def test_relation_residual_rejects_unknown_kind(tables8):
    with pytest.raises(ValueError):
        relation_residual(("mystery", (2, 1)), tables8)


# ---------------------------------------------------------------- dimensions

def test_dimension_report_rows(tables8):
    rows = dimension_report(tables8, 8)
    assert [r.weight for r in rows] == list(range(2, 9))
    assert all(r.generators_agree for r in rows)
    assert [r.monomial_count for r in rows] == [1, 1, 1, 2, 2, 3, 4]
    # the d(W) = d(W-2) + d(W-3) recursion is checkable from weight 5 on
    assert all(r.recursion_ok for r in rows if r.weight >= 5)
    assert all(r.recursion_ok is None for r in rows if r.weight < 5)


def test_dimension_report_requires_solved_weights(tables8):
    with pytest.raises(KeyError):
        dimension_report(tables8, 10)


def test_monomial_count(tables8):
    assert monomial_count(tables8[8]) == 4


# -------------------------------------------------------------- basis report

def test_basis_report_weight_8(tables8):
    rep = basis_report(tables8[8])
    assert rep.generators == [(5, 3)]
    assert rep.generator_count == 1
    assert rep.monomial_count == 4
    assert rep.extension_profile == {0: 1}
    assert rep.depth_sum == 2


def test_basis_report_lines_are_machine_parseable(tables8):
    for line in basis_report(tables8[8]).lines():
        key, _, value = line.partition(" = ")
        assert key.startswith("basis.8.")
        assert value


# -------------------------------------------------------- published listings

def test_published_basis_check_passes_quickly():
    rep = published_basis_check()
    assert rep.passed, rep.failures
    assert rep.counts == {27: 73, 28: 92}
    assert rep.lyndon_counts == {27: 73, 28: 92}
    assert rep.bijection == {27: True, 28: True}
    assert rep.twofold == {
        27: [(6, 4, 6, 4, 3, 1, 1, 1, 1)],
        28: [(8, 6, 6, 4, 1, 1, 1, 1)],
    }
    assert rep.plain_all_lyndon == {27: True, 28: True}
    assert rep.seconds < 1.0


# ----------------------------------------------------------- minimal depth

def test_minimal_depth_confirmed_at_weight_8(tables8):
    rep = minimal_depth_stats(8, tables8)
    assert rep.depth_sum == 2
    assert rep.histogram == {2: 1}
    assert rep.minimal_confirmed is True
    assert rep.alternatives_checked == 1  # (8,) is the only shallower Lyndon word


def test_minimal_depth_not_checked_above_cap(tables8, monkeypatch):
    monkeypatch.setattr(verify_mod, "MINIMALITY_CAP", 7)
    rep = minimal_depth_stats(8, tables8)
    assert rep.minimal_confirmed is None
    assert rep.alternatives_checked == 0
    assert rep.depth_sum == 2
    assert MINIMALITY_CAP == 10  # the module constant itself is untouched
