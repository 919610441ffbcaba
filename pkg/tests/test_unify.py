import math
from fractions import Fraction

import numpy as np
import pytest

from histories_lab.errors import InconsistentSetError, ValidationError
from histories_lab.histories import HistorySchedule, Slot, history_set
from histories_lab.operators import DensityOperator, Projector, ket, projector_onto
from histories_lab.simplex import verify_certificate
from histories_lab.unify import (
    CorrelationSet,
    JointSampleSpace,
    MarginalTable,
    Variable,
    VariableMapping,
    bell_check,
    build_constraint_system,
    chsh_check,
    classify_quasiprobability,
    correlations_from_marginals,
    extract_marginals,
    find_unifying_probability,
    pair_correlation,
    probe_uniqueness,
    product_unify,
)

SA = Variable("a", (1, -1))
SB = Variable("b", (1, -1))
SC = Variable("c", (1, -1))
BOX = Variable("box", ("1", "2", "3"))


def anticorrelated(u, v):
    return MarginalTable((u, v), {(1, 1): 0.0, (1, -1): 0.5, (-1, 1): 0.5, (-1, -1): 0.0})


def uniform(u):
    return MarginalTable((u,), {(1,): 0.5, (-1,): 0.5})


# ---------------------------------------------------------------------------
# marginal tables
# ---------------------------------------------------------------------------

def test_marginal_table_canonical_ordering_and_sum():
    table = MarginalTable((SA,), {(-1,): 0.25, (1,): 0.75})
    assert list(table.values) == [((1,),), ((-1,),)]
    with pytest.raises(ValidationError):
        MarginalTable((SA,), {(1,): 0.9, (-1,): 0.3})  # sums to 1.2


def test_marginal_table_grouped_keys_must_partition():
    MarginalTable((BOX,), {("1",): 1.0, (("2", "3"),): 0.0})
    with pytest.raises(ValidationError):
        MarginalTable((BOX,), {("1",): 1.0, ("2",): 0.0})  # "3" uncovered
    with pytest.raises(ValidationError):
        MarginalTable((BOX,), {(("1", "2"),): 1.0, (("2", "3"),): 0.0})  # overlap


def test_marginal_table_rejects_unknown_outcome():
    with pytest.raises(ValidationError):
        MarginalTable((SA,), {(1,): 0.5, (2,): 0.5})


def test_as_exact_snaps_and_verifies():
    table = MarginalTable((SA,), {(1,): 1 / 3 + 1e-16, (-1,): 2 / 3})
    exact = table.as_exact()
    assert exact.values[((1,),)] == Fraction(1, 3)
    noisy = MarginalTable((SA,), {(1,): 0.123456789101112, (-1,): 1 - 0.123456789101112})
    with pytest.raises(ValidationError):
        noisy.as_exact(max_denominator=10)


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

def test_extract_marginals_refuses_inconsistent_set():
    up, plus = np.array([1.0, 0.0]), ket([1.0, 1.0])
    z = (Projector(projector_onto(up)), Projector(projector_onto([0.0, 1.0])))
    x = (Projector(projector_onto(plus)), Projector(projector_onto(ket([1.0, -1.0]))))
    zx = history_set(
        HistorySchedule((Slot(0.0, x, (1, -1)), Slot(1.0, z, (1, -1))), np.zeros((2, 2))),
        DensityOperator.pure(up), DensityOperator.pure(plus))
    with pytest.raises(InconsistentSetError):
        extract_marginals(zx, VariableMapping((SA, SB)))


def test_extract_marginals_with_groups():
    basis = np.eye(3)
    p1 = Projector(projector_onto(basis[0]))
    p23 = Projector(projector_onto(basis[1]) + projector_onto(basis[2]))
    hset = history_set(
        HistorySchedule((Slot(0.0, (p1, p23), ("1", "23")),), np.zeros((3, 3))),
        DensityOperator.pure(ket([1, 1, 1])), DensityOperator.pure(ket([1, 1, -1])))
    table = extract_marginals(hset, VariableMapping((BOX,), ({"1": ("1",), "23": ("2", "3")},)))
    assert abs(table.values[(("1",),)] - 1.0) < 1e-12
    assert abs(table.values[(("2", "3"),)]) < 1e-12


# ---------------------------------------------------------------------------
# feasibility and uniqueness
# ---------------------------------------------------------------------------

def test_product_of_marginals_is_a_witness():
    space = JointSampleSpace((SA, SB))
    ma = MarginalTable((SA,), {(1,): 1.0, (-1,): 0.0})
    mb = MarginalTable((SB,), {(1,): 1.0, (-1,): 0.0})
    verdict = find_unifying_probability(space, [ma, mb])
    assert verdict.feasible
    assert abs(verdict.witness[(1, 1)] - 1.0) < 2e-9
    product = product_unify([ma, mb])
    assert abs(product.values[((1,), (1,))] - 1.0) < 1e-12


def test_product_unify_rejects_overlapping_variables():
    with pytest.raises(ValidationError):
        product_unify([uniform(SA), uniform(SA)])


def test_product_unify_three_tables_normalized():
    product = product_unify([uniform(SA), uniform(SB), uniform(SC)])
    assert abs(sum(product.values.values()) - 1.0) < 1e-12
    assert len(product.values) == 8


def test_three_box_unification_is_infeasible_with_certificate():
    space = JointSampleSpace((BOX,))
    m1 = MarginalTable((BOX,), {("1",): 1.0, (("2", "3"),): 0.0})
    m2 = MarginalTable((BOX,), {("2",): 1.0, (("1", "3"),): 0.0})
    verdict = find_unifying_probability(space, [m1, m2])
    assert verdict.status == "infeasible"
    system = build_constraint_system(space, [m1, m2], verdict.delta)
    assert verify_certificate(system.matrix, system.rhs, verdict.farkas_certificate)

    exact = find_unifying_probability(space, [m1.as_exact(), m2.as_exact()], exact=True)
    assert exact.status == "infeasible"
    exact_system = build_constraint_system(space, [m1.as_exact(), m2.as_exact()], exact=True)
    assert verify_certificate(exact_system.matrix, exact_system.rhs, exact.farkas_certificate)


def test_exact_mode_requires_rational_values():
    space = JointSampleSpace((SA,))
    table = MarginalTable((SA,), {(1,): 0.5 + 1e-13, (-1,): 0.5 - 1e-13})
    with pytest.raises(ValidationError):
        find_unifying_probability(space, [table], exact=True)


def test_uniqueness_degenerate_marginals():
    space = JointSampleSpace((SA, SB))
    ma = MarginalTable((SA,), {(1,): 1.0, (-1,): 0.0})
    mb = MarginalTable((SB,), {(1,): 1.0, (-1,): 0.0})
    verdict = probe_uniqueness(space, [ma, mb])
    assert verdict.feasible and verdict.unique
    lo, hi = verdict.component_bounds[(1, 1)]
    assert abs(lo - 1.0) < 1e-9 and abs(hi - 1.0) < 1e-9


def test_uniqueness_uncorrelated_uniform_is_free():
    space = JointSampleSpace((SA, SB))
    verdict = probe_uniqueness(space, [uniform(SA), uniform(SB)])
    assert verdict.feasible and verdict.unique is False
    lo, hi = verdict.component_bounds[(1, 1)]
    assert abs(lo) < 1e-9 and abs(hi - 0.5) < 1e-9


def test_uniqueness_exact_perfect_anticorrelations():
    space = JointSampleSpace((SA, SB, SC))
    mab = anticorrelated(SA, SB).as_exact()
    mbc = anticorrelated(SB, SC).as_exact()
    # a anti b, b anti c forces a = c; adding the (a, c) correlated table pins the joint
    mac = MarginalTable((SA, SC), {(1, 1): Fraction(1, 2), (1, -1): Fraction(0),
                                   (-1, 1): Fraction(0), (-1, -1): Fraction(1, 2)})
    verdict = probe_uniqueness(space, [mab, mbc, mac], exact=True)
    assert verdict.feasible and verdict.unique
    assert verdict.witness[(1, -1, 1)] == Fraction(1, 2)


def test_not_evaluated_above_joint_cap():
    # construction enforces the space's own cap
    with pytest.raises(ValidationError):
        JointSampleSpace((Variable("v", tuple(range(10))),), cap=5)
    # the feasibility search has its own cells cap and reports not-evaluated
    space = JointSampleSpace((Variable("v", tuple(range(100))),))
    table = MarginalTable((space.variables[0],), {(k,): 0.01 for k in range(100)})
    verdict = find_unifying_probability(space, [table], cells_cap=50)
    assert verdict.status == "not-evaluated"
    assert verdict.witness is None and verdict.farkas_certificate is None


# ---------------------------------------------------------------------------
# bell / chsh
# ---------------------------------------------------------------------------

def test_bell_uncorrelated_slack_one():
    result = bell_check(CorrelationSet({("a", "b"): 0.0, ("a", "c"): 0.0, ("b", "c"): 0.0}))
    assert result.satisfied and abs(result.slack - 1.0) < 1e-12


def test_bell_perfectly_correlated_boundary():
    result = bell_check(CorrelationSet({("a", "b"): 1.0, ("a", "c"): 1.0, ("b", "c"): 1.0}))
    assert result.satisfied and abs(result.slack) < 1e-12


def test_bell_equal_spacing_pi_thirds_violated():
    # C12 = C23 = 1/2, C13 = -1/2: sum 0.5 exceeds the upper bound 0.0
    result = bell_check(CorrelationSet({("q1", "q2"): 0.5, ("q2", "q3"): 0.5, ("q1", "q3"): -0.5}))
    assert not result.satisfied
    assert abs(result.total - 0.5) < 1e-12
    assert abs(result.upper_bound) < 1e-12
    assert abs(result.slack + 0.5) < 1e-12


def test_chsh_anticorrelated_zx_configuration():
    corr = CorrelationSet({("s1", "s3"): -1.0, ("s2", "s4"): -1.0,
                           ("s1", "s4"): 0.0, ("s2", "s3"): 0.0})
    result = chsh_check(corr)
    assert result.satisfied
    assert sorted(set(round(abs(v), 12) for v in result.values)) == [0.0, 2.0]


def test_chsh_tsirelson_violated():
    c = math.sqrt(2) / 2
    corr = CorrelationSet({("s1", "s3"): -c, ("s1", "s4"): c,
                           ("s2", "s3"): -c, ("s2", "s4"): -c})
    result = chsh_check(corr)
    assert not result.satisfied
    assert abs(result.max_value - 2 * math.sqrt(2)) < 1e-12


def test_chsh_all_zero_satisfied():
    corr = CorrelationSet({("s1", "s3"): 0.0, ("s1", "s4"): 0.0,
                           ("s2", "s3"): 0.0, ("s2", "s4"): 0.0})
    result = chsh_check(corr)
    assert result.satisfied and max(result.values) == 0.0


def test_chsh_rejects_non_bipartite_pairs():
    corr = CorrelationSet({("a", "b"): 0.0, ("b", "c"): 0.0, ("c", "d"): 0.0, ("a", "c"): 0.0})
    with pytest.raises(ValidationError):
        chsh_check(corr)


def test_pair_correlation_and_collection():
    table = anticorrelated(SA, SB)
    assert abs(pair_correlation(table) + 1.0) < 1e-12
    corr = correlations_from_marginals([table, uniform(SC)])
    assert list(corr.values) == [("a", "b")]


def test_correlation_set_validation():
    with pytest.raises(ValidationError):
        CorrelationSet({("a", "b"): 1.5})
    with pytest.raises(ValidationError):
        CorrelationSet({("a", "a"): 0.0})


# ---------------------------------------------------------------------------
# quasi-probability classification
# ---------------------------------------------------------------------------

def test_nonnegative_quasi_probability_is_viable():
    space = JointSampleSpace((SA, SB))
    q = {(1, 1): 0.5, (1, -1): 0.0, (-1, 1): 0.0, (-1, -1): 0.5}
    result = classify_quasiprobability(space, q)
    assert result.viable
    # q itself (the full marginal) is among the constraints
    assert any(len(t.variables) == 2 for t in result.marginals_used)


def test_eprb_zx_quasi_probability_is_viable():
    space = JointSampleSpace(tuple(Variable(f"s{i}", (1, -1)) for i in (1, 2, 3, 4)))
    q = {cell: (1 - cell[0] * cell[2]) * (1 - cell[1] * cell[3]) / 16
         for cell in space.cells()}
    result = classify_quasiprobability(space, q)
    assert result.viable


def test_three_box_quasi_probability_is_not_viable():
    space = JointSampleSpace((BOX,))
    q = {("1",): 1.0, ("2",): 1.0, ("3",): -1.0}
    result = classify_quasiprobability(space, q)
    assert not result.viable
    assert result.verdict.status == "infeasible"
    used = [t.values for t in result.marginals_used]
    assert len(used) == 2  # the two non-negative two-block coarse-grainings


def test_three_box_quasi_classification_exact_mode():
    space = JointSampleSpace((BOX,))
    q = {("1",): 1, ("2",): 1, ("3",): -1}
    result = classify_quasiprobability(space, q, exact=True)
    assert not result.viable
    assert result.verdict.mode == "exact"
    assert all(isinstance(v, Fraction) for v in result.verdict.farkas_certificate)


def test_quasi_probability_must_sum_to_one():
    space = JointSampleSpace((SA,))
    with pytest.raises(ValidationError):
        classify_quasiprobability(space, {(1,): 0.7, (-1,): 0.7})


def test_quasi_policy_validation():
    space = JointSampleSpace((SA,))
    with pytest.raises(ValidationError):
        classify_quasiprobability(space, {(1,): 0.5, (-1,): 0.5}, policy="nope")
