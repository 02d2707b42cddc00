"""Knob-parameterized quantum models and empirical relative-frequency tables.

A :class:`KnobModel` assigns a density operator to every preparation knob
setting and a projective resolution of the identity to every detection knob
setting; outcome probabilities are traces of their products.  A
:class:`RelFreqTable` holds the empirical side: outcome frequencies per knob
pair, possibly defined on only a subset of the pairs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    ContractViolation,
    hermitian_sqrt,
    trace_product,
    validate_density,
    validate_resolution,
)

Label = str

ROW_SUM_TOL = 1e-12


class UnknownLabelError(KeyError):
    """Label not present in the model's knob space."""


@dataclass(frozen=True)
class KnobSpace:
    """Finite ordered label sets: preparation knobs, detection knobs, outcome bins."""

    a_settings: tuple[Label, ...]
    b_settings: tuple[Label, ...]
    outcomes: tuple[Label, ...]

    def __post_init__(self):
        for name, labels in (
            ("a_settings", self.a_settings),
            ("b_settings", self.b_settings),
            ("outcomes", self.outcomes),
        ):
            if not labels:
                raise ValueError(f"{name} must be non-empty")
            if len(set(labels)) != len(labels):
                raise ValueError(f"{name} has duplicate labels")
        object.__setattr__(self, "a_settings", tuple(self.a_settings))
        object.__setattr__(self, "b_settings", tuple(self.b_settings))
        object.__setattr__(self, "outcomes", tuple(self.outcomes))

    def to_json_dict(self) -> dict:
        return {
            "a_settings": list(self.a_settings),
            "b_settings": list(self.b_settings),
            "outcomes": list(self.outcomes),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "KnobSpace":
        return cls(
            tuple(d["a_settings"]), tuple(d["b_settings"]), tuple(d["outcomes"])
        )


@dataclass
class RelFreqTable:
    """Empirical outcome frequencies per (a, b) knob pair.

    ``rows`` maps a defined (a, b) pair to a frequency vector over the
    outcome bins, in the order of ``space.outcomes``.  Pairs never tried in
    the experiment are simply absent.
    """

    space: KnobSpace
    rows: dict[tuple[Label, Label], np.ndarray]

    def __post_init__(self):
        clean = {}
        for (a, b), row in self.rows.items():
            if a not in self.space.a_settings or b not in self.space.b_settings:
                raise UnknownLabelError(f"({a}, {b}) not in knob space")
            v = np.asarray(row, dtype=float)
            if v.shape != (len(self.space.outcomes),):
                raise ValueError(f"row ({a}, {b}) has wrong length")
            if np.any(v < 0) or np.any(v > 1):
                raise ValueError(f"row ({a}, {b}) has values outside [0, 1]")
            if abs(v.sum() - 1.0) > ROW_SUM_TOL:
                raise ValueError(f"row ({a}, {b}) sums to {v.sum()!r}, expected 1")
            clean[(a, b)] = v
        self.rows = clean

    @property
    def defined_pairs(self) -> list[tuple[Label, Label]]:
        return list(self.rows)

    def value(self, a: Label, b: Label, c: Label) -> float:
        return float(self.rows[(a, b)][self.space.outcomes.index(c)])

    def to_json_dict(self) -> dict:
        for a, b in self.rows:
            if "|" in a or "|" in b:
                raise ValueError("labels containing '|' cannot be serialized")
        return {
            "space": self.space.to_json_dict(),
            "rows": {f"{a}|{b}": list(map(float, row)) for (a, b), row in self.rows.items()},
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RelFreqTable":
        space = KnobSpace.from_json_dict(d["space"])
        rows = {}
        for key, row in d["rows"].items():
            a, _, b = key.partition("|")
            rows[(a, b)] = np.asarray(row, dtype=float)
        return cls(space, rows)

    @classmethod
    def random(cls, space: KnobSpace, rng: np.random.Generator) -> "RelFreqTable":
        """Fully defined table with Dirichlet-uniform rows; handy for sweeps."""
        rows = {}
        for a in space.a_settings:
            for b in space.b_settings:
                row = rng.dirichlet(np.ones(len(space.outcomes)))
                row = row / row.sum()
                rows[(a, b)] = row
        return cls(space, rows)


@dataclass
class TrialRecord:
    """Raw experimental trials as (a, b, c) label triples."""

    trials: list[tuple[Label, Label, Label]] = field(default_factory=list)


def relfreq_from_trials(record: TrialRecord, space: KnobSpace) -> RelFreqTable:
    """Tally trials into a relative-frequency table.

    The table is defined exactly on the (a, b) pairs that occur in the
    record.
    """
    if not record.trials:
        raise ValueError("empty trial record")
    counts: dict[tuple[Label, Label], np.ndarray] = {}
    for a, b, c in record.trials:
        if (
            a not in space.a_settings
            or b not in space.b_settings
            or c not in space.outcomes
        ):
            raise UnknownLabelError(f"trial ({a}, {b}, {c}) not in knob space")
        key = (a, b)
        if key not in counts:
            counts[key] = np.zeros(len(space.outcomes))
        counts[key][space.outcomes.index(c)] += 1
    rows = {key: cnt / cnt.sum() for key, cnt in counts.items()}
    return RelFreqTable(space, rows)


@dataclass
class KnobModel:
    """Density operators per a-setting and projective resolutions per b-setting."""

    space: KnobSpace
    dim: int
    rho: dict[Label, np.ndarray]
    resolution: dict[Label, dict[Label, np.ndarray]]

    def validate(self) -> list[str]:
        """All contract violations; empty means the model is well formed."""
        problems = []
        for a in self.space.a_settings:
            if a not in self.rho:
                problems.append(f"missing density for a={a}")
                continue
            m = self.rho[a]
            if m.shape != (self.dim, self.dim):
                problems.append(f"rho({a}) has wrong dimension")
                continue
            rep = validate_density(m)
            problems.extend(f"rho({a}): {v}" for v in rep.violations)
        for b in self.space.b_settings:
            if b not in self.resolution:
                problems.append(f"missing resolution for b={b}")
                continue
            blocks = [self.resolution[b].get(c) for c in self.space.outcomes]
            if any(blk is None for blk in blocks):
                problems.append(f"resolution({b}) missing outcome blocks")
                continue
            rep = validate_resolution(blocks)
            problems.extend(f"resolution({b}): {v}" for v in rep.violations)
        return problems

    def outcome_distribution(self, a: Label, b: Label) -> np.ndarray:
        return np.array([probability(self, a, b, c) for c in self.space.outcomes])

    def to_json_dict(self) -> dict:
        def mat(m: np.ndarray) -> list:
            return [[[float(z.real), float(z.imag)] for z in row] for row in m]

        return {
            "space": self.space.to_json_dict(),
            "dim": self.dim,
            "rho": {a: mat(m) for a, m in self.rho.items()},
            "resolution": {
                b: {c: mat(m) for c, m in blocks.items()}
                for b, blocks in self.resolution.items()
            },
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "KnobModel":
        def mat(rows: list) -> np.ndarray:
            return np.array(
                [[complex(re, im) for re, im in row] for row in rows], dtype=complex
            )

        return cls(
            space=KnobSpace.from_json_dict(d["space"]),
            dim=int(d["dim"]),
            rho={a: mat(m) for a, m in d["rho"].items()},
            resolution={
                b: {c: mat(m) for c, m in blocks.items()}
                for b, blocks in d["resolution"].items()
            },
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_json_dict(), **kwargs)

    @classmethod
    def from_json(cls, s: str) -> "KnobModel":
        return cls.from_json_dict(json.loads(s))


def probability(model: KnobModel, a: Label, b: Label, c: Label) -> float:
    """Outcome probability Tr[rho(a) E(b)(c)], clamped to [0, 1]."""
    if a not in model.rho:
        raise UnknownLabelError(f"unknown a-setting {a!r}")
    if b not in model.resolution or c not in model.resolution[b]:
        raise UnknownLabelError(f"unknown (b, c) pair ({b!r}, {c!r})")
    p = trace_product(model.rho[a], model.resolution[b][c])
    if p < -1e-10 or p > 1 + 1e-10:
        raise ContractViolation(f"probability {p!r} outside [0, 1] beyond tolerance")
    return min(max(p, 0.0), 1.0)


def overlap(r1, r2) -> float:
    """Tr[sqrt(r1) sqrt(r2)] for two density operators.

    Equals |<a1|a2>|^2 for pure states.
    """
    for name, r in (("r1", r1), ("r2", r2)):
        rep = validate_density(r)
        if not rep.ok:
            raise ContractViolation(f"{name} is not a valid density: {rep.violations}")
    return trace_product(hermitian_sqrt(r1), hermitian_sqrt(r2), imag_tol=1e-8)


def statistical_distance(p, q) -> float:
    """Total-variation distance between two finite distributions."""
    pv = np.asarray(p, dtype=float)
    qv = np.asarray(q, dtype=float)
    if pv.shape != qv.shape:
        raise ValueError(f"mismatched support: {pv.shape} vs {qv.shape}")
    for name, v in (("p", pv), ("q", qv)):
        if abs(v.sum() - 1.0) > 1e-10:
            raise ValueError(f"{name} does not sum to 1")
    return 0.5 * float(np.sum(np.abs(pv - qv)))


def model_distance(m1: KnobModel, m2: KnobModel, metric=statistical_distance) -> float:
    """Max over knob pairs of the distance between induced outcome distributions.

    The per-pair metric defaults to total variation and is pluggable.
    """
    if m1.space != m2.space:
        raise ValueError("models are defined on different knob spaces")
    worst = 0.0
    for a in m1.space.a_settings:
        for b in m1.space.b_settings:
            d = metric(m1.outcome_distribution(a, b), m2.outcome_distribution(a, b))
            worst = max(worst, d)
    return worst


def is_restriction(m_small: KnobModel, m_big: KnobModel, tol: float = 1e-12) -> bool:
    """True iff m_small's knob sets are subsets of m_big's and the maps agree there."""
    if m_small.dim != m_big.dim:
        return False
    if not set(m_small.space.a_settings) <= set(m_big.space.a_settings):
        return False
    if not set(m_small.space.b_settings) <= set(m_big.space.b_settings):
        return False
    if m_small.space.outcomes != m_big.space.outcomes:
        return False
    for a in m_small.space.a_settings:
        if np.max(np.abs(m_small.rho[a] - m_big.rho[a])) > tol:
            return False
    for b in m_small.space.b_settings:
        for c in m_small.space.outcomes:
            if np.max(np.abs(m_small.resolution[b][c] - m_big.resolution[b][c])) > tol:
                return False
    return True


def derive_table(model: KnobModel) -> RelFreqTable:
    """The table a model induces on its full knob domain."""
    rows = {}
    for a in model.space.a_settings:
        for b in model.space.b_settings:
            row = model.outcome_distribution(a, b)
            rows[(a, b)] = row / row.sum()
    return RelFreqTable(model.space, rows)


def pure_density(vec) -> np.ndarray:
    """|v><v| for a (normalized on entry) state vector."""
    v = np.asarray(vec, dtype=complex)
    v = v / np.linalg.norm(v)
    return np.outer(v, v.conj())
