import numpy as np

from histories_lab.classicality import classify, detect_zero_cover
from histories_lab.histories import HistorySchedule, Slot, history_set
from histories_lab.operators import DensityOperator, Projector, ket, projector_onto

from conftest import random_history_set

H2 = np.zeros((2, 2))
UP = np.array([1.0, 0.0])
PLUS = ket([1.0, 1.0])
Z_DECOMP = (Projector(projector_onto(UP)), Projector(projector_onto([0.0, 1.0])))
X_DECOMP = (Projector(projector_onto(PLUS)), Projector(projector_onto(ket([1.0, -1.0]))))


def griffiths(slots):
    return history_set(HistorySchedule(tuple(slots), H2),
                       DensityOperator.pure(UP), DensityOperator.pure(PLUS))


def three_box_fine():
    basis = np.eye(3)
    projs = tuple(Projector(projector_onto(basis[i])) for i in range(3))
    return history_set(HistorySchedule((Slot(0.0, projs, ("1", "2", "3")),), np.zeros((3, 3))),
                       DensityOperator.pure(ket([1, 1, 1])),
                       DensityOperator.pure(ket([1, 1, -1])))


def test_griffiths_z_set_is_decoherent():
    report = classify(griffiths([Slot(0.0, Z_DECOMP, (1, -1))]))
    assert report.decoherent and report.consistent
    assert report.partially_decoherent and report.linearly_positive


def test_griffiths_combined_set_is_not_consistent():
    report = classify(griffiths([Slot(0.0, X_DECOMP, (1, -1)), Slot(1.0, Z_DECOMP, (1, -1))]))
    assert not report.consistent
    assert report.max_offdiag_re > 0.2


def test_single_time_decomposition_is_decoherent():
    rng = np.random.default_rng(21)
    from conftest import random_decomposition, random_density

    decomposition = random_decomposition(rng, 4)
    schedule = HistorySchedule((Slot(0.0, decomposition, tuple(range(len(decomposition)))),),
                               np.zeros((4, 4)))
    assert classify(history_set(schedule, random_density(rng, 4))).decoherent


def test_hierarchy_never_inverts_on_random_sets():
    rng = np.random.default_rng(22)
    for _ in range(100):
        r = classify(random_history_set(rng))
        assert (not r.decoherent) or r.consistent
        assert (not r.consistent) or r.partially_decoherent
        assert (not r.partially_decoherent) or r.linearly_positive


def test_classify_monotone_in_tolerance():
    rng = np.random.default_rng(23)
    flags = ("decoherent", "consistent", "partially_decoherent", "linearly_positive")
    for _ in range(30):
        hset = random_history_set(rng)
        previous = None
        for tol in (1e-12, 1e-8, 1e-4, 1e-1, 10.0):
            report = classify(hset, tol)
            current = {f: getattr(report, f) for f in flags}
            if previous is not None:
                for f in flags:
                    assert not (previous[f] and not current[f])
            previous = current


def test_combined_eprb_set_linearly_positive_but_inconsistent_exists():
    # search the planar-angle family for a combined four-spin set whose
    # quasi-probabilities are all non-negative while interference persists
    import math
    from histories_lab.scenarios import eprb_planar

    found = False
    for theta4 in np.linspace(math.pi / 2 - 0.4, math.pi / 2 + 0.4, 9):
        desc = eprb_planar(0.0, math.pi / 2, 0.0, float(theta4))
        report = classify(desc.build("combined"))
        if report.linearly_positive and not report.consistent:
            found = True
            break
    assert found


def test_zero_cover_three_box_witness():
    report = detect_zero_cover(three_box_fine())
    assert report.evaluated and report.found and not report.preclusive
    assert report.witness == (("2",), ("3",))


def test_zero_cover_griffiths_z_is_preclusive():
    report = detect_zero_cover(griffiths([Slot(0.0, Z_DECOMP, (1, -1))]))
    assert report.evaluated and not report.found and report.preclusive


def test_zero_cover_uniform_born_is_preclusive():
    rho = DensityOperator.maximally_mixed(2)
    hset = history_set(HistorySchedule((Slot(0.0, Z_DECOMP, (1, -1)),), H2), rho)
    report = detect_zero_cover(hset)
    assert report.preclusive


def test_zero_cover_threshold_zero_on_exactly_consistent_set():
    # additivity: union measure equals the member sum, so no cover can exist
    rho = DensityOperator.maximally_mixed(2)
    hset = history_set(HistorySchedule((Slot(0.0, X_DECOMP, (1, -1)),), H2), rho)
    report = detect_zero_cover(hset, threshold=0.0)
    assert report.preclusive and not report.found


def test_zero_cover_not_evaluated_when_too_large():
    dim = 13  # 13 histories exceeds the automatic enumeration limit of 12
    basis = np.eye(dim)
    projs = tuple(Projector(projector_onto(basis[i])) for i in range(dim))
    hset = history_set(
        HistorySchedule((Slot(0.0, projs, tuple(range(dim))),), np.zeros((dim, dim))),
        DensityOperator.maximally_mixed(dim))
    report = detect_zero_cover(hset)
    assert not report.evaluated
    assert not report.found and not report.preclusive


def test_zero_cover_respects_explicit_max_subset():
    report = detect_zero_cover(three_box_fine(), max_subset=2)
    assert report.found and len(report.witness) == 2
