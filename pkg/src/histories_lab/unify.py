"""Existence (and uniqueness) of a joint probability matching given marginals.

The central question: given probability tables from several history sets over
shared finite variables, is there one non-negative joint distribution whose
coarse-grainings reproduce every table?  This is a linear-programming
feasibility problem over the joint simplex; infeasibility comes back with a
verifiable Farkas certificate.  Bell and CHSH inequality checks are provided
as analytic cross-checks for the dichotomic 3- and 4-variable cases, where
they are equivalent to LP feasibility.

Marginal tables may carry coarse outcome groups (e.g. "box 2 or 3") as well
as atomic outcomes; each key constrains the sum of the joint cells it covers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Hashable, Mapping, Sequence

import numpy as np

from .classicality import classify
from .errors import InconsistentSetError, NumericError, ValidationError
from .histories import HistorySet, history_probabilities
from .simplex import (
    INFEASIBLE,
    OPTIMAL,
    solve_lp,
    verify_certificate,
)

Outcome = Hashable
Cell = tuple
GroupKey = tuple

DEFAULT_DELTA = 1e-9
DEFAULT_JOINT_CAP = 10**6

FEASIBLE = "feasible"
STATUS_INFEASIBLE = "infeasible"
NOT_EVALUATED = "not-evaluated"


@dataclass(frozen=True)
class Variable:
    """A named finite variable."""

    name: str
    outcomes: tuple[Outcome, ...]

    def __post_init__(self):
        object.__setattr__(self, "outcomes", tuple(self.outcomes))
        if not self.outcomes:
            raise ValidationError(f"variable {self.name!r} needs a non-empty outcome alphabet")
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValidationError(f"variable {self.name!r} has duplicate outcomes")

    def outcome_index(self, outcome: Outcome) -> int:
        try:
            return self.outcomes.index(outcome)
        except ValueError:
            raise ValidationError(
                f"outcome {outcome!r} is not in the alphabet of variable {self.name!r}"
            ) from None


@dataclass(frozen=True)
class JointSampleSpace:
    """Ordered finite variables; the joint cells are their cartesian product."""

    variables: tuple[Variable, ...]
    cap: int = DEFAULT_JOINT_CAP

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValidationError("variable names must be unique")
        if self.size > self.cap:
            raise ValidationError(f"joint size {self.size} exceeds cap {self.cap}")

    @property
    def size(self) -> int:
        n = 1
        for v in self.variables:
            n *= len(v.outcomes)
        return n

    def cells(self) -> list[Cell]:
        return list(itertools.product(*(v.outcomes for v in self.variables)))

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ValidationError(f"no variable named {name!r} in the sample space")

    def axis(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise ValidationError(f"no variable named {name!r} in the sample space")


def _canonical_group(var: Variable, group) -> GroupKey:
    """Normalize one key entry to a tuple of outcomes in alphabet order."""
    if isinstance(group, (list, set, frozenset)):
        members: tuple = tuple(group)
    elif isinstance(group, tuple):
        members = group
    else:
        members = (group,)
    indices = sorted(var.outcome_index(m) for m in members)
    if len(set(indices)) != len(indices):
        raise ValidationError(f"group {group!r} repeats an outcome of {var.name!r}")
    return tuple(var.outcomes[i] for i in indices)


@dataclass(frozen=True)
class MarginalTable:
    """A probability table over a subset of variables.

    Keys are tuples with one entry per table variable; each entry is either an
    atomic outcome or a group (tuple) of outcomes.  Per variable, the groups
    used must partition its alphabet, and the keys must form the full product
    of those partitions, so the values are a genuine probability table.
    """

    variables: tuple[Variable, ...]
    values: dict
    tol: float = DEFAULT_DELTA

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValidationError("marginal table needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValidationError("marginal table variables must be distinct")

        canonical: dict[tuple[GroupKey, ...], object] = {}
        for key, value in self.values.items():
            key = key if isinstance(key, tuple) else (key,)
            if len(key) != len(self.variables):
                raise ValidationError(
                    f"key {key!r} must have one entry per variable ({len(self.variables)})"
                )
            norm = tuple(_canonical_group(v, g) for v, g in zip(self.variables, key))
            if norm in canonical:
                raise ValidationError(f"duplicate key {key!r} in marginal table")
            canonical[norm] = value

        partitions = []
        for pos, var in enumerate(self.variables):
            groups = sorted({k[pos] for k in canonical},
                            key=lambda g: tuple(var.outcome_index(o) for o in g))
            seen: set = set()
            for g in groups:
                if seen & set(g):
                    raise ValidationError(f"groups of variable {var.name!r} overlap")
                seen |= set(g)
            if seen != set(var.outcomes):
                raise ValidationError(f"groups of variable {var.name!r} do not cover its alphabet")
            partitions.append(groups)
        expected_keys = set(itertools.product(*partitions))
        if set(canonical) != expected_keys:
            raise ValidationError("marginal table keys must form the full product of the per-variable partitions")

        ordered_keys = sorted(
            canonical,
            key=lambda k: tuple(
                tuple(v.outcome_index(o) for o in g) for v, g in zip(self.variables, k)
            ),
        )
        values = {k: canonical[k] for k in ordered_keys}

        total = sum(values.values())
        if self.is_exact_values(values):
            if total != 1:
                raise ValidationError(f"marginal values must sum to 1 exactly, got {total}")
            if any(v < 0 for v in values.values()):
                raise ValidationError("marginal values must be non-negative")
        else:
            if abs(float(total) - 1.0) > self.tol:
                raise ValidationError(f"marginal values must sum to 1, got {float(total)!r}")
            if any(float(v) < -self.tol for v in values.values()):
                raise ValidationError("marginal values must be non-negative within tolerance")
        object.__setattr__(self, "values", values)

    @staticmethod
    def is_exact_values(values: Mapping) -> bool:
        return all(isinstance(v, Rational) for v in values.values())

    @property
    def is_exact(self) -> bool:
        return self.is_exact_values(self.values)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    def as_exact(self, max_denominator: int = 10**9, tol: float = 1e-12) -> "MarginalTable":
        """Snap float values onto nearby small rationals, verifying the distance.

        Raises ``ValidationError`` when a value has no rational approximation
        within ``tol``; exact tables pass through unchanged.
        """
        if self.is_exact:
            return self
        snapped = {}
        for key, value in self.values.items():
            frac = Fraction(float(value)).limit_denominator(max_denominator)
            if abs(float(frac) - float(value)) > tol:
                raise ValidationError(
                    f"value {value!r} for key {key!r} is not rational within {tol}"
                )
            snapped[key] = frac
        return MarginalTable(self.variables, snapped, self.tol)


@dataclass(frozen=True)
class CorrelationSet:
    """Pair correlations of dichotomic +-1 variables, keyed by name pairs."""

    values: dict
    tol: float = 1e-9

    def __post_init__(self):
        normalized = {}
        for key, value in self.values.items():
            a, b = key
            if a == b:
                raise ValidationError("correlation pairs need two distinct variables")
            pair = (a, b) if a <= b else (b, a)
            if pair in normalized:
                raise ValidationError(f"duplicate correlation pair {pair!r}")
            if abs(float(value)) > 1.0 + self.tol:
                raise ValidationError(f"correlation {pair!r} = {value!r} is outside [-1, 1]")
            normalized[pair] = float(value)
        object.__setattr__(self, "values", dict(sorted(normalized.items())))

    def get(self, a: str, b: str) -> float:
        pair = (a, b) if a <= b else (b, a)
        return self.values[pair]

    @property
    def names(self) -> tuple[str, ...]:
        seen = sorted({n for pair in self.values for n in pair})
        return tuple(seen)


@dataclass
class FeasibilityVerdict:
    """Outcome of a unifying-probability search.

    feasible   -> ``witness`` is a non-negative joint table matching every
                  marginal within delta;
    infeasible -> ``farkas_certificate`` verifies against the constraint
                  system; not-evaluated -> the joint size exceeded the cap.
    """

    status: str
    witness: dict | None = None
    farkas_certificate: list | None = None
    unique: bool | None = None
    component_bounds: dict | None = None
    mode: str = "float"
    delta: float = DEFAULT_DELTA

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE


@dataclass(frozen=True)
class VariableMapping:
    """How the label positions of a history set map onto joint variables.

    ``outcome_groups[k]`` optionally translates slot-``k`` label symbols into
    groups of outcomes of the k-th variable (needed when a history is a coarse
    alternative such as "box 2 or 3"); unlisted symbols map to themselves.
    """

    variables: tuple[Variable, ...]
    outcome_groups: tuple[Mapping | None, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.outcome_groups is not None:
            groups = tuple(dict(g) if g else None for g in self.outcome_groups)
            if len(groups) != len(self.variables):
                raise ValidationError("outcome_groups must have one entry per variable")
            object.__setattr__(self, "outcome_groups", groups)

    def key_for(self, label: tuple) -> tuple:
        if len(label) != len(self.variables):
            raise ValidationError(
                f"label {label!r} has {len(label)} positions, mapping expects {len(self.variables)}"
            )
        key = []
        for pos, symbol in enumerate(label):
            translation = None
            if self.outcome_groups is not None:
                translation = self.outcome_groups[pos]
            if translation is not None and symbol in translation:
                key.append(tuple(translation[symbol]))
            else:
                key.append(symbol)
        return tuple(key)


def extract_marginals(hset: HistorySet, mapping: VariableMapping,
                      tol: float = 1e-10) -> MarginalTable:
    """Turn a consistent history set's probabilities into a marginal table.

    Refuses inconsistent sets: their diagonal entries do not obey the sum
    rules, so they are not probabilities of anything.
    """
    report = classify(hset, tol)
    if not report.consistent:
        raise InconsistentSetError(
            f"history set is not consistent (max off-diagonal Re = {report.max_offdiag_re:.3e})"
        )
    values: dict = {}
    for label, prob in history_probabilities(hset).items():
        key = mapping.key_for(label)
        values[key] = values.get(key, 0.0) + prob
    return MarginalTable(mapping.variables, values)


# ---------------------------------------------------------------------------
# constraint system and LP front ends
# ---------------------------------------------------------------------------

@dataclass
class ConstraintSystem:
    """Standard-form system (matrix x = rhs, x >= 0) for the unifier LP.

    The first ``n_cells`` columns are the joint cells in row-major order;
    float mode appends one slack column per band row.
    """

    matrix: object
    rhs: object
    cells: list[Cell]
    n_cells: int
    row_meta: list[str]
    exact: bool
    delta: float


def _check_tables(space: JointSampleSpace, marginals: Sequence[MarginalTable]) -> None:
    for t, table in enumerate(marginals):
        for var in table.variables:
            try:
                owner = space.variable(var.name)
            except ValidationError:
                raise ValidationError(f"marginal {t} uses unknown variable {var.name!r}") from None
            if owner.outcomes != var.outcomes:
                raise ValidationError(
                    f"marginal {t} disagrees with the sample space about the alphabet of {var.name!r}"
                )


def _key_cell_indices(space: JointSampleSpace, table: MarginalTable, key: tuple) -> list[int]:
    """Joint-cell indices covered by one (possibly grouped) marginal key."""
    axes = [space.axis(v.name) for v in table.variables]
    per_axis: dict[int, tuple] = dict(zip(axes, key))
    choices = []
    for i, var in enumerate(space.variables):
        if i in per_axis:
            group = per_axis[i]
            choices.append(group if isinstance(group, tuple) else (group,))
        else:
            choices.append(var.outcomes)
    strides = []
    stride = 1
    for var in reversed(space.variables):
        strides.append(stride)
        stride *= len(var.outcomes)
    strides = list(reversed(strides))
    indices = [0]
    for i, var in enumerate(space.variables):
        step = [var.outcome_index(o) * strides[i] for o in choices[i]]
        indices = [base + s for base in indices for s in step]
    return sorted(indices)


def build_constraint_system(space: JointSampleSpace, marginals: Sequence[MarginalTable],
                            delta: float = DEFAULT_DELTA, exact: bool = False,
                            relax: bool = True) -> ConstraintSystem:
    """Assemble the marginal-matching constraints over the joint cells.

    Exact mode: one equality row per marginal key plus the normalization row.
    Float mode with ``relax``: each equality becomes a two-sided band of width
    delta (slack variables make the bands equalities again); without ``relax``
    the float system keeps hard equality rows, which the solver's phase-1
    feasibility tolerance still cushions against ~1e-15 marginal noise.
    """
    _check_tables(space, marginals)
    cells = space.cells()
    n = len(cells)

    entries: list[tuple[list[int], object, str]] = []
    for t, table in enumerate(marginals):
        for key, value in table.values.items():
            idx = _key_cell_indices(space, table, key)
            entries.append((idx, value, f"marginal[{t}]{key!r}"))
    entries.append((list(range(n)), Fraction(1) if exact else 1.0, "normalization"))

    if exact:
        matrix: list[list[Fraction]] = []
        rhs: list[Fraction] = []
        meta: list[str] = []
        for idx, value, name in entries:
            row = [Fraction(0)] * n
            for k in idx:
                row[k] = Fraction(1)
            matrix.append(row)
            rhs.append(value if isinstance(value, Fraction) else Fraction(value))
            meta.append(name)
        return ConstraintSystem(matrix, rhs, cells, n, meta, True, 0.0)

    if not relax:
        m = len(entries)
        matrix_f = np.zeros((m, n))
        rhs_f = np.zeros(m)
        meta = []
        for r, (idx, value, name) in enumerate(entries):
            matrix_f[r, idx] = 1.0
            rhs_f[r] = float(value)
            meta.append(name)
        return ConstraintSystem(matrix_f, rhs_f, cells, n, meta, False, 0.0)

    m = 2 * len(entries)
    matrix_f = np.zeros((m, n + m))
    rhs_f = np.zeros(m)
    meta = []
    for r, (idx, value, name) in enumerate(entries):
        value = float(value)
        upper, lower = 2 * r, 2 * r + 1
        matrix_f[upper, idx] = 1.0
        rhs_f[upper] = value + delta
        matrix_f[lower, idx] = -1.0
        rhs_f[lower] = -(value - delta)
        meta.append(f"{name} <= +delta")
        meta.append(f"{name} >= -delta")
    matrix_f[:, n:] = np.eye(m)
    return ConstraintSystem(matrix_f, rhs_f, cells, n, meta, False, delta)


def _verify_witness(system: ConstraintSystem, marginals: Sequence[MarginalTable],
                    space: JointSampleSpace, witness: dict) -> None:
    values = [witness[c] for c in system.cells]
    if system.exact:
        if any(v < 0 for v in values):
            raise NumericError("exact witness has a negative cell")
        for table in marginals:
            for key, target in table.values.items():
                got = sum(values[k] for k in _key_cell_indices(space, table, key))
                if got != target:
                    raise NumericError(f"exact witness misses marginal key {key!r}")
        if sum(values) != 1:
            raise NumericError("exact witness is not normalized")
        return
    arr = np.array([float(v) for v in values])
    if arr.min() < -1e-12:
        raise NumericError(f"witness has a negative cell ({arr.min()})")
    slop = system.delta + 1e-12
    for table in marginals:
        for key, target in table.values.items():
            got = arr[_key_cell_indices(space, table, key)].sum()
            if abs(got - float(target)) > slop:
                raise NumericError(f"witness misses marginal key {key!r} by {abs(got - float(target))}")
    if abs(arr.sum() - 1.0) > slop:
        raise NumericError("witness is not normalized within delta")


def verify_witness(space: JointSampleSpace, marginals: Sequence[MarginalTable],
                   witness: Mapping[Cell, object], delta: float = DEFAULT_DELTA,
                   exact: bool = False) -> None:
    """Raise ``NumericError`` unless the witness is non-negative and reproduces
    every marginal within delta (exactly, in exact mode)."""
    system = build_constraint_system(space, marginals, delta, exact)
    _verify_witness(system, marginals, space, dict(witness))


def find_unifying_probability(space: JointSampleSpace, marginals: Sequence[MarginalTable],
                              delta: float = DEFAULT_DELTA, exact: bool = False,
                              backend: str | None = None,
                              cells_cap: int = DEFAULT_JOINT_CAP) -> FeasibilityVerdict:
    """Search for a non-negative joint table reproducing every marginal.

    Returns a witness (verified against the inputs before being reported) or
    a verified Farkas certificate.  ``exact=True`` requires rational marginal
    values and decides feasibility exactly, independent of delta.  Joint
    spaces larger than ``cells_cap`` come back ``not-evaluated``.
    """
    if exact and not all(t.is_exact for t in marginals):
        raise ValidationError("exact mode requires rational marginal values (see MarginalTable.as_exact)")
    if space.size > cells_cap:
        return FeasibilityVerdict(status=NOT_EVALUATED, mode="exact" if exact else "float", delta=delta)
    system = build_constraint_system(space, marginals, delta, exact)
    result = solve_lp(system.matrix, system.rhs, None, exact=exact, backend=backend)
    mode = "exact" if exact else "float"
    if result.status == OPTIMAL:
        cell_values = result.x[: system.n_cells]
        if not exact:
            cell_values = np.where(np.abs(cell_values) < 1e-15, 0.0, cell_values)
        witness = {cell: value for cell, value in zip(system.cells, cell_values)}
        _verify_witness(system, marginals, space, witness)
        return FeasibilityVerdict(status=FEASIBLE, witness=witness, mode=mode, delta=delta)
    if result.status == INFEASIBLE:
        certificate = list(result.certificate)
        if not verify_certificate(system.matrix, system.rhs, certificate):
            raise NumericError("Farkas certificate failed verification")
        return FeasibilityVerdict(status=STATUS_INFEASIBLE, farkas_certificate=certificate,
                                  mode=mode, delta=delta)
    raise NumericError(f"unexpected LP status {result.status!r} in feasibility solve")


def probe_uniqueness(space: JointSampleSpace, marginals: Sequence[MarginalTable],
                     delta: float = DEFAULT_DELTA, exact: bool = False,
                     backend: str | None = None) -> FeasibilityVerdict:
    """Per-cell min/max LPs under the marginal constraints; unique iff every cell is pinned.

    A cell is pinned when its attainable range is at most delta (exact mode
    demands a zero range).  The probes run against the unrelaxed equality
    constraints; with the delta-band system every cell would trivially have a
    range of about 2*delta and nothing could ever be reported unique.
    """
    verdict = find_unifying_probability(space, marginals, delta, exact, backend)
    if not verdict.feasible:
        return verdict
    system = build_constraint_system(space, marginals, delta, exact, relax=False)
    n_cols = len(system.matrix[0]) if exact else system.matrix.shape[1]
    bounds: dict[Cell, tuple] = {}
    unique = True
    for k, cell in enumerate(system.cells):
        lo_c = [Fraction(0)] * n_cols if exact else np.zeros(n_cols)
        lo_c[k] = Fraction(1) if exact else 1.0
        low = solve_lp(system.matrix, system.rhs, lo_c, exact=exact,
                       backend=backend)
        hi_c = [Fraction(0)] * n_cols if exact else np.zeros(n_cols)
        hi_c[k] = Fraction(-1) if exact else -1.0
        high = solve_lp(system.matrix, system.rhs, hi_c, exact=exact,
                        backend=backend)
        if low.status != OPTIMAL or high.status != OPTIMAL:
            raise NumericError("uniqueness probe LP did not solve")
        lo = low.objective
        hi = -high.objective
        bounds[cell] = (lo, hi)
        spread = hi - lo
        if (spread > 0) if exact else (float(spread) > delta):
            unique = False
    verdict.unique = unique
    verdict.component_bounds = bounds
    return verdict


def product_unify(marginals: Sequence[MarginalTable]) -> MarginalTable:
    """Product joint table for marginals over pairwise disjoint variables."""
    tables = list(marginals)
    if not tables:
        raise ValidationError("product unification needs at least one marginal")
    seen: set[str] = set()
    for table in tables:
        overlap = seen & set(table.names)
        if overlap:
            raise ValidationError(f"marginals overlap on variables {sorted(overlap)}")
        seen |= set(table.names)
    variables = tuple(v for table in tables for v in table.variables)
    values: dict = {}
    for combo in itertools.product(*(t.values.items() for t in tables)):
        key = tuple(g for part, _ in combo for g in part)
        value = combo[0][1]
        for _, v in combo[1:]:
            value = value * v
        values[key] = value
    return MarginalTable(variables, values)


# ---------------------------------------------------------------------------
# inequality cross-checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BellCheck:
    satisfied: bool
    slack: float
    total: float
    upper_bound: float


@dataclass(frozen=True)
class CHSHCheck:
    satisfied: bool
    values: tuple[float, ...]

    @property
    def max_value(self) -> float:
        return max(self.values)


def pair_correlation(table: MarginalTable) -> float:
    """Correlation sum(v1 * v2 * p) of a two-variable table with numeric outcomes."""
    if len(table.variables) != 2:
        raise ValidationError("pair correlation needs a table over exactly two variables")
    total = 0.0
    for key, value in table.values.items():
        factors = []
        for group in key:
            if len(group) != 1:
                raise ValidationError("pair correlation needs atomic (ungrouped) outcomes")
            try:
                factors.append(float(group[0]))
            except (TypeError, ValueError):
                raise ValidationError(f"outcome {group[0]!r} is not numeric") from None
        total += factors[0] * factors[1] * float(value)
    return total


def correlations_from_marginals(marginals: Sequence[MarginalTable]) -> CorrelationSet:
    """Collect pair correlations from every two-variable dichotomic table."""
    values = {}
    for table in marginals:
        if len(table.variables) == 2 and all(len(v.outcomes) == 2 for v in table.variables):
            values[table.names] = pair_correlation(table)
    return CorrelationSet(values)


def bell_check(correlations: CorrelationSet, tol: float = 1e-9) -> BellCheck:
    """Three-variable inequality: -1 <= C12+C13+C23 <= 1 + 2 min(Cij).

    Slack is the distance to the nearest bound, negative when violated; a
    joint distribution over the three dichotomic variables (with unbiased
    singles) exists iff the check passes.  ``tol`` absorbs float noise for
    configurations sitting exactly on a bound.
    """
    if len(correlations.values) != 3 or len(correlations.names) != 3:
        raise ValidationError("bell check needs the three pair correlations of three variables")
    c = list(correlations.values.values())
    total = sum(c)
    upper = 1.0 + 2.0 * min(c)
    slack = min(total + 1.0, upper - total)
    return BellCheck(satisfied=slack >= -tol, slack=slack, total=total, upper_bound=upper)


def chsh_check(correlations: CorrelationSet, tol: float = 1e-9) -> CHSHCheck:
    """Eight four-variable inequalities over the pairs of a 2x2 bipartite layout.

    The four correlations must form a complete bipartite pair graph; the
    bipartition is inferred from the missing pairs.  Each value is a signed
    sum with an odd number of minus signs; satisfied iff all are <= 2, with
    ``tol`` absorbing float noise at the bound.
    """
    if len(correlations.values) != 4:
        raise ValidationError("chsh check needs exactly four pair correlations")
    names = correlations.names
    if len(names) != 4:
        raise ValidationError("chsh check needs four distinct variables")
    present = set(correlations.values)
    missing = [frozenset(p) for p in itertools.combinations(names, 2)
               if tuple(sorted(p)) not in present]
    if len(missing) != 2 or (missing[0] & missing[1]):
        raise ValidationError("the four pairs must form a complete bipartite layout")
    side_a = tuple(sorted(missing[0]))
    side_b = tuple(sorted(missing[1]))
    c = {(a, b): correlations.get(a, b) for a in side_a for b in side_b}
    c13 = c[(side_a[0], side_b[0])]
    c14 = c[(side_a[0], side_b[1])]
    c23 = c[(side_a[1], side_b[0])]
    c24 = c[(side_a[1], side_b[1])]
    combos = (
        c13 + c14 + c23 - c24,
        c13 + c14 - c23 + c24,
        c13 - c14 + c23 + c24,
        -c13 + c14 + c23 + c24,
    )
    values = combos + tuple(-v for v in combos)
    return CHSHCheck(satisfied=max(values) <= 2.0 + tol, values=values)


# ---------------------------------------------------------------------------
# quasi-probability classification
# ---------------------------------------------------------------------------

@dataclass
class QuasiClassification:
    viable: bool
    marginals_used: list[MarginalTable]
    verdict: FeasibilityVerdict


def _marginalize(space: JointSampleSpace, q: Mapping[Cell, object],
                 names: tuple[str, ...]) -> dict:
    axes = [space.axis(n) for n in names]
    out: dict = {}
    for cell, value in q.items():
        key = tuple(cell[a] for a in axes)
        out[key] = out.get(key, 0) + value
    return out


def classify_quasiprobability(space: JointSampleSpace, q: Mapping[Cell, object],
                              policy: str = "maximal-nonnegative",
                              delta: float = DEFAULT_DELTA, tol: float = 1e-12,
                              exact: bool = False) -> QuasiClassification:
    """Decide whether a quasi-probability is viable.

    Collects the coarse-grainings of ``q`` that are non-negative within
    ``tol`` and asks whether one true joint probability matches them all.
    Policies:

    - ``maximal-nonnegative`` (default): marginals over every variable subset,
      kept when non-negative and not implied by a kept superset; plus, for
      variables not covered by any kept subset, all two-block groupings of
      that variable's alphabet.
    - ``variable-subsets``: as above without the two-block groupings.
    - ``all-nonnegative``: every non-negative candidate, no maximality filter.
    """
    if policy not in ("maximal-nonnegative", "variable-subsets", "all-nonnegative"):
        raise ValidationError(f"unknown marginal-selection policy {policy!r}")
    cells = space.cells()
    if set(q) != set(cells):
        raise ValidationError("quasi-probability must assign a value to every joint cell")
    total = sum(q.values())
    if abs(float(total) - 1.0) > max(tol, 1e-9):
        raise ValidationError(f"quasi-probability must sum to 1, got {float(total)!r}")

    names = tuple(v.name for v in space.variables)
    subset_tables: dict[tuple[str, ...], dict] = {}
    nonneg: set[tuple[str, ...]] = set()
    for size in range(1, len(names) + 1):
        for subset in itertools.combinations(names, size):
            marg = _marginalize(space, q, subset)
            subset_tables[subset] = marg
            if min(float(v) for v in marg.values()) >= -tol:
                nonneg.add(subset)

    if policy == "all-nonnegative":
        kept = sorted(nonneg, key=lambda s: (len(s), s))
    else:
        kept = sorted(
            (s for s in nonneg
             if not any(set(s) < set(other) for other in nonneg)),
            key=lambda s: (len(s), s),
        )

    marginals = [
        MarginalTable(tuple(space.variable(n) for n in subset), subset_tables[subset])
        for subset in kept
    ]

    if policy in ("maximal-nonnegative", "all-nonnegative"):
        covered = {n for subset in kept for n in subset}
        for name in names:
            if name in covered and policy != "all-nonnegative":
                continue
            var = space.variable(name)
            k = len(var.outcomes)
            if k < 3:
                continue
            fine = subset_tables[(name,)]
            for r in range(1, k // 2 + 1):
                for block in itertools.combinations(var.outcomes, r):
                    rest = tuple(o for o in var.outcomes if o not in block)
                    if len(block) == k - len(block) and block > rest:
                        continue  # avoid listing each half-half split twice
                    grouped = {
                        (block,): sum(fine[(o,)] for o in block),
                        (rest,): sum(fine[(o,)] for o in rest),
                    }
                    if min(float(v) for v in grouped.values()) >= -tol:
                        marginals.append(MarginalTable((var,), grouped))

    verdict = find_unifying_probability(space, marginals, delta=delta, exact=exact)
    return QuasiClassification(viable=verdict.feasible, marginals_used=marginals, verdict=verdict)
