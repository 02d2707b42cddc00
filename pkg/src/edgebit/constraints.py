"""Executable constraints any quantum model must satisfy to fit a frequency table.

Two theorems are checked: an upper bound on the overlap of preparations for
distinct a-settings, and a lower bound on the operator-norm separation of
resolution blocks for distinct b-settings.  Both are proved consequences of
the factorization requirement, so for a model that genuinely reproduces the
table a reported violation always indicates an implementation bug.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .linalg import operator_norm
from .models import KnobModel, Label, RelFreqTable, overlap, probability

# Asymmetric comparison tolerance: roundoff must never fake a violation of
# a proved theorem.
BOUND_TOL = 1e-8

# 2^|C| subset enumeration cap; above this only singletons and their
# complements are scanned and the report is flagged partial.
EXHAUSTIVE_OUTCOME_LIMIT = 12

FACTORIZATION_TOL = 1e-9


class FactorizationError(ValueError):
    """Model does not reproduce the table it is being checked against."""

    def __init__(self, worst: tuple[Label, Label, Label], error: float):
        self.worst = worst
        self.error = error
        super().__init__(
            f"model does not factor the table: worst error {error:.3e} at {worst}"
        )


@dataclass
class BoundEntry:
    labels: tuple
    bound: float
    attained: float
    satisfied: bool
    margin: float


@dataclass
class BoundReport:
    """Per-pair bound comparisons plus the worst margin over all pairs.

    ``direction`` is "upper" (attained must stay below bound) or "lower"
    (attained must stay above bound); margins are positive when satisfied.
    """

    direction: str
    pairs: list[BoundEntry] = field(default_factory=list)
    exhaustive_scan: bool = True

    @property
    def worst_margin(self) -> float:
        return min((e.margin for e in self.pairs), default=float("inf"))

    @property
    def all_satisfied(self) -> bool:
        return all(e.satisfied for e in self.pairs)

    def to_json_dict(self) -> dict:
        return {
            "direction": self.direction,
            "exhaustive_scan": self.exhaustive_scan,
            "worst_margin": self.worst_margin,
            "all_satisfied": self.all_satisfied,
            "pairs": [
                {
                    "labels": list(e.labels),
                    "bound": e.bound,
                    "attained": e.attained,
                    "satisfied": e.satisfied,
                    "margin": e.margin,
                }
                for e in self.pairs
            ],
        }


def _outcome_subsets(n: int):
    """Proper non-empty outcome subsets as index tuples.

    The empty set and the full set make the bound trivially vacuous, so
    they are skipped.  Above the enumeration cap, only singletons and
    their complements are scanned.
    """
    if n <= EXHAUSTIVE_OUTCOME_LIMIT:
        for mask in range(1, (1 << n) - 1):
            yield tuple(i for i in range(n) if mask >> i & 1)
    else:
        everything = set(range(n))
        for i in range(n):
            yield (i,)
            yield tuple(sorted(everything - {i}))


def outcome_scan_is_exhaustive(n_outcomes: int) -> bool:
    return n_outcomes <= EXHAUSTIVE_OUTCOME_LIMIT


def overlap_upper_bound(nu: RelFreqTable, a1: Label, a2: Label) -> float:
    """Least value of sqrt(nu(a2,b)(w)) + sqrt(1 - nu(a1,b)(w)) over b and outcome unions w."""
    n = len(nu.space.outcomes)
    common_b = [
        b
        for b in nu.space.b_settings
        if (a1, b) in nu.rows and (a2, b) in nu.rows
    ]
    if not common_b:
        raise ValueError(f"no b-setting with the table defined at both {a1!r} and {a2!r}")
    best = float("inf")
    for b in common_b:
        row1 = nu.rows[(a1, b)]
        row2 = nu.rows[(a2, b)]
        for subset in _outcome_subsets(n):
            idx = list(subset)
            v = np.sqrt(max(row2[idx].sum(), 0.0)) + np.sqrt(
                max(1.0 - row1[idx].sum(), 0.0)
            )
            best = min(best, float(v))
    return best


def resolution_separation_lower_bound(
    nu: RelFreqTable, b1: Label, b2: Label, c: Label
) -> float:
    """Max over a-settings of |nu(a,b1)(c) - nu(a,b2)(c)|."""
    ci = nu.space.outcomes.index(c)
    common_a = [
        a
        for a in nu.space.a_settings
        if (a, b1) in nu.rows and (a, b2) in nu.rows
    ]
    if not common_a:
        raise ValueError(f"no a-setting with the table defined at both {b1!r} and {b2!r}")
    return max(abs(float(nu.rows[(a, b1)][ci] - nu.rows[(a, b2)][ci])) for a in common_a)


def verify_factorization(
    model: KnobModel, nu: RelFreqTable, tol: float = FACTORIZATION_TOL
) -> None:
    """Raise :class:`FactorizationError` unless the model reproduces the table."""
    worst_err = -1.0
    worst = None
    for (a, b), row in nu.rows.items():
        for ci, c in enumerate(nu.space.outcomes):
            err = abs(probability(model, a, b, c) - float(row[ci]))
            if err > worst_err:
                worst_err = err
                worst = (a, b, c)
    if worst_err > tol:
        raise FactorizationError(worst, worst_err)


def check_overlap_constraint(
    model: KnobModel, nu: RelFreqTable, tol: float = BOUND_TOL
) -> BoundReport:
    """Overlap upper bound for every ordered pair of distinct a-settings."""
    verify_factorization(model, nu)
    report = BoundReport(
        direction="upper",
        exhaustive_scan=outcome_scan_is_exhaustive(len(nu.space.outcomes)),
    )
    for a1, a2 in itertools.permutations(nu.space.a_settings, 2):
        try:
            bound = overlap_upper_bound(nu, a1, a2)
        except ValueError:
            continue  # no common defined b: the table says nothing about this pair
        attained = overlap(model.rho[a1], model.rho[a2])
        margin = bound - attained
        report.pairs.append(
            BoundEntry((a1, a2), bound, attained, margin >= -tol, margin)
        )
    return report


def check_separation_constraint(
    model: KnobModel, nu: RelFreqTable, tol: float = BOUND_TOL
) -> BoundReport:
    """Resolution-norm lower bound for every b-pair and outcome bin."""
    verify_factorization(model, nu)
    report = BoundReport(direction="lower")
    for b1, b2 in itertools.combinations(nu.space.b_settings, 2):
        for c in nu.space.outcomes:
            try:
                bound = resolution_separation_lower_bound(nu, b1, b2, c)
            except ValueError:
                continue
            attained = operator_norm(model.resolution[b1][c] - model.resolution[b2][c])
            margin = attained - bound
            report.pairs.append(
                BoundEntry((b1, b2, c), bound, attained, margin >= -tol, margin)
            )
    return report
