"""Class operators, decoherence functionals and (quasi-)probabilities for histories.

A history schedule is a time-ordered list of projective decompositions plus a
Hermitian generator.  Each label tuple ``(a_1, ..., a_n)`` (earliest outcome
first) gets the class operator ``C = P_{a_n}(t_n) ... P_{a_1}(t_1)`` built from
Heisenberg-picture projectors; the family sums to the identity.  Probabilities
are diagonal entries of the decoherence functional
``D(x, y) = Tr(C_x rho C_y^dag)``, optionally post-selected on a final state
with the ``1 / Tr(rho_f rho)`` normalization.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .errors import (
    DegeneratePostSelectionError,
    HistoryCountError,
    ValidationError,
)
from .operators import (
    DEFAULT_TOL,
    DensityOperator,
    Projector,
    as_square_matrix,
    frozen_array,
    heisenberg_projector,
    is_hermitian,
    max_abs,
    validate_projective_decomposition,
)

DEFAULT_HISTORY_CAP = 4096

Label = tuple  # tuple of outcome symbols, one per schedule slot


@dataclass(frozen=True)
class Slot:
    """One moment of the schedule: a time, a decomposition and its outcome symbols."""

    time: float
    projectors: tuple[Projector, ...]
    symbols: tuple[Hashable, ...]

    def __post_init__(self):
        object.__setattr__(self, "time", float(self.time))
        projs = tuple(p if isinstance(p, Projector) else Projector(p) for p in self.projectors)
        object.__setattr__(self, "projectors", projs)
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.symbols) != len(projs):
            raise ValidationError(
                f"slot needs one symbol per projector, got {len(self.symbols)} for {len(projs)}"
            )
        if len(set(self.symbols)) != len(self.symbols):
            raise ValidationError("slot symbols must be distinct")


@dataclass(frozen=True)
class HistorySchedule:
    """Strictly time-ordered slots sharing one Hamiltonian."""

    slots: tuple[Slot, ...]
    hamiltonian: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        slots = tuple(self.slots)
        if not slots:
            raise ValidationError("schedule must contain at least one slot")
        object.__setattr__(self, "slots", slots)
        h = as_square_matrix(self.hamiltonian, "hamiltonian")
        if not is_hermitian(h, self.tol):
            raise ValidationError("schedule hamiltonian must be Hermitian")
        object.__setattr__(self, "hamiltonian", frozen_array(h))

        dim = h.shape[0]
        times = [s.time for s in slots]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValidationError(f"slot times must be strictly increasing, got {times}")
        for k, slot in enumerate(slots):
            if any(p.dim != dim for p in slot.projectors):
                raise ValidationError(f"slot {k} projector dimension does not match hamiltonian")
            report = validate_projective_decomposition(slot.projectors, self.tol)
            if not report.valid:
                raise ValidationError(
                    f"slot {k} is not a projective decomposition "
                    f"(max violation {report.max_violation:.3e})"
                )

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    def label_count(self) -> int:
        n = 1
        for slot in self.slots:
            n *= len(slot.projectors)
        return n


@dataclass(frozen=True)
class ClassOperator:
    """One history: a label and its operator; homogeneous = product of projectors."""

    label: Label
    matrix: np.ndarray
    homogeneous: bool = True

    def __post_init__(self):
        object.__setattr__(self, "label", tuple(self.label))
        object.__setattr__(self, "matrix", frozen_array(as_square_matrix(self.matrix, "class operator")))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_class_operators(schedule: HistorySchedule, cap: int = DEFAULT_HISTORY_CAP) -> list[ClassOperator]:
    """Build every class operator of a schedule, one per outcome-label tuple.

    The returned list sums to the identity.  Raises ``HistoryCountError``
    when the schedule would produce more than ``cap`` histories.
    """
    n = schedule.label_count()
    if n > cap:
        raise HistoryCountError(f"schedule yields {n} histories, cap is {cap}")

    moved: list[list[np.ndarray]] = []
    for slot in schedule.slots:
        moved.append(
            [heisenberg_projector(p, schedule.hamiltonian, slot.time, schedule.tol).matrix
             for p in slot.projectors]
        )

    symbol_axes = [slot.symbols for slot in schedule.slots]
    out = []
    for choice in itertools.product(*(range(len(sym)) for sym in symbol_axes)):
        label = tuple(symbol_axes[k][i] for k, i in enumerate(choice))
        # latest-time projector on the left
        op = moved[0][choice[0]]
        for k in range(1, len(choice)):
            op = moved[k][choice[k]] @ op
        out.append(ClassOperator(label=label, matrix=op, homogeneous=True))
    return out


def negate(c: ClassOperator) -> ClassOperator:
    """Negation 1 - C of a history; the result is inhomogeneous."""
    eye = np.eye(c.dim, dtype=complex)
    return ClassOperator(label=("not",) + c.label, matrix=eye - c.matrix, homogeneous=False)


def coarse_grain(operators: Sequence[ClassOperator], label: Label | None = None) -> ClassOperator:
    """Sum of class operators (the history 'one of these happened')."""
    ops = list(operators)
    if not ops:
        raise ValidationError("coarse graining needs at least one class operator")
    total = ops[0].matrix.copy()
    for c in ops[1:]:
        total = total + c.matrix
    merged = tuple(c.label for c in ops) if label is None else tuple(label)
    return ClassOperator(label=merged, matrix=total, homogeneous=len(ops) == 1 and ops[0].homogeneous)


@dataclass(frozen=True)
class HistorySet:
    """A labelled family of class operators plus boundary conditions.

    The class operators must sum to the identity within ``tol``.  When a final
    state is present, probabilities are conditioned on it and the overlap
    ``Tr(rho_f rho)`` must be resolvable.
    """

    class_operators: tuple[ClassOperator, ...]
    initial: DensityOperator
    final: DensityOperator | None = None
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        ops = tuple(self.class_operators)
        if not ops:
            raise ValidationError("history set must contain at least one class operator")
        object.__setattr__(self, "class_operators", ops)
        dim = self.initial.dim
        if any(c.dim != dim for c in ops):
            raise ValidationError("class operators must match the initial state dimension")
        labels = [c.label for c in ops]
        if len(set(labels)) != len(labels):
            raise ValidationError("class operator labels must be distinct")
        total = np.zeros((dim, dim), dtype=complex)
        for c in ops:
            total += c.matrix
        dev = max_abs(total - np.eye(dim))
        if dev > self.tol:
            raise ValidationError(f"class operators must sum to the identity (deviation {dev:.3e})")
        if self.final is not None:
            if self.final.dim != dim:
                raise ValidationError("final state dimension does not match initial state")
            overlap = float(np.trace(self.final.matrix @ self.initial.matrix).real)
            if overlap <= self.tol:
                raise DegeneratePostSelectionError(
                    f"Tr(rho_f rho) = {overlap:.3e} is too small to normalize by"
                )

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(c.label for c in self.class_operators)

    @property
    def dim(self) -> int:
        return self.initial.dim

    def operator(self, label: Label) -> ClassOperator:
        for c in self.class_operators:
            if c.label == tuple(label):
                return c
        raise ValidationError(f"label {label!r} is not in this history set")

    def post_selection_weight(self) -> float:
        """Normalization Tr(rho_f rho); 1.0 when there is no final state."""
        if self.final is None:
            return 1.0
        return float(np.trace(self.final.matrix @ self.initial.matrix).real)


def history_set(schedule: HistorySchedule, initial: DensityOperator,
                final: DensityOperator | None = None,
                cap: int = DEFAULT_HISTORY_CAP) -> HistorySet:
    """Convenience: build the class operators of a schedule into a HistorySet."""
    return HistorySet(
        class_operators=tuple(build_class_operators(schedule, cap)),
        initial=initial,
        final=final,
        tol=schedule.tol,
    )


@dataclass(frozen=True)
class DecoherenceFunctional:
    """Hermitian matrix of interference terms indexed by history-label pairs.

    The diagonal holds the candidate probabilities.  Without a final state the
    entries sum to exactly 1 up to floating error; with post-selection that sum
    is only a diagnostic (it equals 1 when the set is consistent).
    """

    labels: tuple[Label, ...]
    entries: np.ndarray
    post_selected: bool = False

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        m = as_square_matrix(self.entries, "decoherence functional")
        if m.shape[0] != len(self.labels):
            raise ValidationError("decoherence functional must be indexed by the label list")
        object.__setattr__(self, "entries", frozen_array(m))

    def index(self, label: Label) -> int:
        try:
            return self.labels.index(tuple(label))
        except ValueError:
            raise ValidationError(f"label {label!r} is not in this decoherence functional") from None

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def probability(self, label: Label) -> float:
        return float(self.entries[self.index(label), self.index(label)].real)

    def total(self) -> complex:
        return complex(self.entries.sum())

    def max_offdiagonal_abs(self) -> float:
        return _max_offdiag(np.abs(self.entries))

    def max_offdiagonal_re(self) -> float:
        return _max_offdiag(np.abs(self.entries.real))


def _max_offdiag(mag: np.ndarray) -> float:
    if mag.shape[0] < 2:
        return 0.0
    off = mag - np.diag(np.diag(mag))
    return float(off.max())


def decoherence_functional(hset: HistorySet) -> DecoherenceFunctional:
    """Interference matrix D(x, y) = Tr(C_x rho C_y^dag), post-selected if a final state is set.

    Hermiticity is enforced structurally by symmetrizing, so
    ``D(x, y) == conj(D(y, x))`` holds exactly.
    """
    ops = np.stack([c.matrix for c in hset.class_operators])
    if hset.final is None:
        left = ops @ hset.initial.matrix
        weight = 1.0
    else:
        left = hset.final.matrix @ ops @ hset.initial.matrix
        weight = hset.post_selection_weight()
    # D[i, j] = Tr(left_i C_j^dag) = sum_ab left_i[a, b] * conj(C_j[a, b])
    flat_left = left.reshape(left.shape[0], -1)
    flat_ops = ops.reshape(ops.shape[0], -1)
    entries = (flat_left @ flat_ops.conj().T) / weight
    entries = (entries + entries.conj().T) / 2
    return DecoherenceFunctional(labels=hset.labels, entries=entries,
                                 post_selected=hset.final is not None)


def _weighted_trace(hset: HistorySet, matrix: np.ndarray) -> complex:
    if hset.final is None:
        return complex(np.trace(matrix))
    return complex(np.trace(hset.final.matrix @ matrix)) / hset.post_selection_weight()


def history_probability(hset: HistorySet, label: Label) -> float:
    """Diagonal decoherence-functional entry for one history."""
    c = hset.operator(label)
    return float(_weighted_trace(hset, c.matrix @ hset.initial.matrix @ c.matrix.conj().T).real)


def history_probabilities(hset: HistorySet) -> dict[Label, float]:
    d = decoherence_functional(hset)
    return {label: float(p) for label, p in zip(d.labels, d.diagonal())}


def quasi_probability(hset: HistorySet, label: Label) -> float:
    """Linear quasi-probability Re Tr(C rho) (post-selected when applicable).

    May be negative; the values sum to 1 over the whole set, and coincide with
    the history probabilities exactly when the set is consistent.
    """
    c = hset.operator(label)
    return float(_weighted_trace(hset, c.matrix @ hset.initial.matrix).real)


def quasi_probabilities(hset: HistorySet) -> dict[Label, float]:
    return {c.label: quasi_probability(hset, c.label) for c in hset.class_operators}


def negation_interference(hset: HistorySet, label: Label) -> complex:
    """Interference D(x, not-x) between a history and its negation 1 - C.

    Its real part is exactly the gap between the quasi-probability and the
    probability of the history: ``q - p = Re D(x, not-x)``.
    """
    c = hset.operator(label)
    cbar = negate(c)
    return _weighted_trace(hset, c.matrix @ hset.initial.matrix @ cbar.matrix.conj().T)


def coarse_measure(hset: HistorySet, labels: Sequence[Label]) -> float:
    """Measure of the union history: probability of the summed class operator."""
    ops = [hset.operator(label) for label in labels]
    summed = coarse_grain(ops)
    m = summed.matrix @ hset.initial.matrix @ summed.matrix.conj().T
    return float(_weighted_trace(hset, m).real)
