"""Classification of history sets on the hierarchy of classicality conditions.

The hierarchy, strongest first: decoherent (all off-diagonal interference
vanishes), consistent (real parts vanish), partially decoherent (each history
has zero interference with its own negation, i.e. quasi-probability equals
probability), linearly positive (all quasi-probabilities non-negative).
Also detects "zero cover" pathologies: coarse-grainings of individually
likely histories whose union has zero measure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .histories import DecoherenceFunctional, HistorySet, Label, decoherence_functional, quasi_probabilities

DEFAULT_ZERO_COVER_THRESHOLD = 1e-9
MAX_ENUMERATED_SUBSETS = 1 << 20
AUTO_ENUMERATION_LIMIT = 12


@dataclass(frozen=True)
class ClassicalityReport:
    """Flags and diagnostics from one classification run.

    The flags are cascaded (each implies the next weaker one by construction),
    so a report can never invert the hierarchy even when a diagnostic sits at
    a tolerance boundary.
    """

    decoherent: bool
    consistent: bool
    partially_decoherent: bool
    linearly_positive: bool
    max_offdiag_abs: float
    max_offdiag_re: float
    min_quasi: float
    max_prob_quasi_gap: float
    tolerance_used: float

    def __post_init__(self):
        ok = (
            (not self.decoherent or self.consistent)
            and (not self.consistent or self.partially_decoherent)
            and (not self.partially_decoherent or self.linearly_positive)
        )
        if not ok:
            raise AssertionError("classicality flags violate the hierarchy")


def classify(hset: HistorySet, tol: float = 1e-10,
             functional: DecoherenceFunctional | None = None) -> ClassicalityReport:
    """Classify a history set at an absolute tolerance.

    Enlarging ``tol`` can only turn flags on, never off.  A precomputed
    decoherence functional may be supplied to avoid recomputation.
    """
    d = functional if functional is not None else decoherence_functional(hset)
    probs = d.diagonal()
    quasi = quasi_probabilities(hset)
    q = np.array([quasi[label] for label in d.labels])

    max_abs_off = d.max_offdiagonal_abs()
    max_re_off = d.max_offdiagonal_re()
    min_q = float(q.min())
    max_gap = float(np.max(np.abs(q - probs)))

    decoherent = max_abs_off <= tol
    consistent = max_re_off <= tol or decoherent
    partially_decoherent = max_gap <= tol or consistent
    linearly_positive = min_q >= -tol or partially_decoherent

    return ClassicalityReport(
        decoherent=decoherent,
        consistent=consistent,
        partially_decoherent=partially_decoherent,
        linearly_positive=linearly_positive,
        max_offdiag_abs=max_abs_off,
        max_offdiag_re=max_re_off,
        min_quasi=min_q,
        max_prob_quasi_gap=max_gap,
        tolerance_used=tol,
    )


@dataclass(frozen=True)
class ZeroCoverReport:
    """Result of searching coarse-grainings for a zero-measure union.

    ``witness`` lists the labels of histories that each carry measure above
    the threshold while their union does not.  ``evaluated`` is False when the
    subset enumeration was skipped because it would be too large; that state
    is distinct from ``preclusive`` (which asserts the search ran and found
    nothing).
    """

    found: bool
    witness: tuple[Label, ...] | None
    preclusive: bool
    evaluated: bool
    threshold_used: float


def _not_evaluated(threshold: float) -> ZeroCoverReport:
    return ZeroCoverReport(found=False, witness=None, preclusive=False,
                           evaluated=False, threshold_used=threshold)


def detect_zero_cover(hset: HistorySet, threshold: float = DEFAULT_ZERO_COVER_THRESHOLD,
                      max_subset: int | None = None,
                      functional: DecoherenceFunctional | None = None) -> ZeroCoverReport:
    """Search unions of 2..max_subset histories for a zero cover.

    A union's measure is the bilinear sum of decoherence-functional entries
    over its members, which equals the measure of the summed class operator.
    Without an explicit ``max_subset`` the search runs only for sets of at
    most 12 histories (all subset sizes); larger sets come back not-evaluated.
    The reported witness is the smallest one; ties are broken by the
    lexicographically smallest complement, i.e. the coarsest negation.
    """
    n = len(hset.class_operators)
    if max_subset is None:
        if n > AUTO_ENUMERATION_LIMIT:
            return _not_evaluated(threshold)
        max_subset = n
    max_subset = min(max_subset, n)

    total = sum(math.comb(n, k) for k in range(2, max_subset + 1))
    if total > MAX_ENUMERATED_SUBSETS:
        return _not_evaluated(threshold)

    d = functional if functional is not None else decoherence_functional(hset)
    entries = d.entries
    measures = d.diagonal()

    best: tuple | None = None
    for size in range(2, max_subset + 1):
        for subset in itertools.combinations(range(n), size):
            if any(measures[i] <= threshold for i in subset):
                continue
            idx = list(subset)
            union_measure = float(entries[np.ix_(idx, idx)].sum().real)
            if union_measure <= threshold:
                complement = tuple(i for i in range(n) if i not in subset)
                key = (size, complement, subset)
                if best is None or key < best:
                    best = key
        if best is not None:
            break

    if best is None:
        return ZeroCoverReport(found=False, witness=None, preclusive=True,
                               evaluated=True, threshold_used=threshold)
    witness = tuple(hset.class_operators[i].label for i in best[2])
    return ZeroCoverReport(found=True, witness=witness, preclusive=False,
                           evaluated=True, threshold_used=threshold)
