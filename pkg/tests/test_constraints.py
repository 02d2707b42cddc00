import itertools

import numpy as np
import pytest

from edgebit.constraints import (
    FactorizationError,
    check_overlap_constraint,
    check_separation_constraint,
    overlap_upper_bound,
    resolution_separation_lower_bound,
)
from edgebit.linalg import operator_norm
from edgebit.models import (
    KnobModel,
    KnobSpace,
    RelFreqTable,
    derive_table,
    overlap,
    pure_density,
)
from edgebit.synthesis import synthesize_model


def brute_force_bound(nu, a1, a2):
    """Exhaustive scan over proper non-empty outcome subsets, written naively."""
    n = len(nu.space.outcomes)
    best = float("inf")
    for b in nu.space.b_settings:
        if (a1, b) not in nu.rows or (a2, b) not in nu.rows:
            continue
        for r in range(1, n):
            for subset in itertools.combinations(range(n), r):
                s1 = sum(nu.rows[(a1, b)][i] for i in subset)
                s2 = sum(nu.rows[(a2, b)][i] for i in subset)
                best = min(best, np.sqrt(s2) + np.sqrt(max(1 - s1, 0.0)))
    return best


class TestOverlapUpperBound:
    def test_near_deterministic(self):
        space = KnobSpace(("a1", "a2"), ("b",), ("c", "d"))
        nu = RelFreqTable(
            space, {("a1", "b"): [0.96, 0.04], ("a2", "b"): [0.01, 0.99]}
        )
        bound = overlap_upper_bound(nu, "a1", "a2")
        assert bound <= np.sqrt(0.01) + np.sqrt(0.04) + 1e-12

    def test_perfect_discrimination(self):
        space = KnobSpace(("a1", "a2"), ("b",), ("c", "d"))
        nu = RelFreqTable(space, {("a1", "b"): [1.0, 0.0], ("a2", "b"): [0.0, 1.0]})
        assert overlap_upper_bound(nu, "a1", "a2") == pytest.approx(0.0, abs=1e-12)

    def test_uniform_is_vacuous(self):
        space = KnobSpace(("a1", "a2"), ("b",), ("c0", "c1"))
        nu = RelFreqTable(space, {("a1", "b"): [0.5, 0.5], ("a2", "b"): [0.5, 0.5]})
        bound = overlap_upper_bound(nu, "a1", "a2")
        assert bound == pytest.approx(np.sqrt(2), abs=1e-12)
        assert bound > 1

    def test_matches_brute_force(self):
        rng = np.random.default_rng(13)
        space = KnobSpace(("a1", "a2", "a3"), ("b1", "b2"), ("c0", "c1", "c2", "c3"))
        for _ in range(5):
            nu = RelFreqTable.random(space, rng)
            for a1, a2 in itertools.permutations(space.a_settings, 2):
                assert overlap_upper_bound(nu, a1, a2) == pytest.approx(
                    brute_force_bound(nu, a1, a2), abs=1e-12
                )

    def test_no_common_b(self):
        space = KnobSpace(("a1", "a2"), ("b1", "b2"), ("c0", "c1"))
        nu = RelFreqTable(space, {("a1", "b1"): [1, 0], ("a2", "b2"): [0, 1]})
        with pytest.raises(ValueError):
            overlap_upper_bound(nu, "a1", "a2")

    def test_monotone_under_b_restriction(self):
        # scanning fewer b-settings can only raise the minimum
        rng = np.random.default_rng(19)
        space = KnobSpace(("a1", "a2"), ("b1", "b2", "b3"), ("c0", "c1", "c2"))
        nu = RelFreqTable.random(space, rng)
        full = overlap_upper_bound(nu, "a1", "a2")
        restricted_rows = {k: v for k, v in nu.rows.items() if k[1] != "b3"}
        restricted = RelFreqTable(space, restricted_rows)
        assert overlap_upper_bound(restricted, "a1", "a2") >= full - 1e-12


class TestSeparationLowerBound:
    def test_same_b(self):
        space = KnobSpace(("a",), ("b1", "b2"), ("c0", "c1"))
        nu = RelFreqTable(space, {("a", "b1"): [0.3, 0.7], ("a", "b2"): [0.3, 0.7]})
        assert resolution_separation_lower_bound(nu, "b1", "b2", "c0") == 0.0

    def test_extreme(self):
        space = KnobSpace(("a",), ("b1", "b2"), ("c0", "c1"))
        nu = RelFreqTable(space, {("a", "b1"): [1.0, 0.0], ("a", "b2"): [0.0, 1.0]})
        assert resolution_separation_lower_bound(nu, "b1", "b2", "c0") == pytest.approx(1.0)

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(29)
        space = KnobSpace(("a1", "a2", "a3"), ("b1", "b2"), ("c0", "c1"))
        nu = RelFreqTable.random(space, rng)
        got = resolution_separation_lower_bound(nu, "b1", "b2", "c0")
        ci = 0
        want = max(
            abs(nu.rows[(a, "b1")][ci] - nu.rows[(a, "b2")][ci])
            for a in space.a_settings
        )
        assert got == pytest.approx(want, abs=1e-15)


def superposition_model():
    """Dim-2 model with overlapping preparations and its exactly derived table."""
    space = KnobSpace(("a1", "a2"), ("b",), ("c0", "c1"))
    rho = {"a1": pure_density([1.0, 0.0]), "a2": pure_density([1.0, 1.0])}
    resolution = {
        "b": {
            "c0": np.diag([1.0, 0.0]).astype(complex),
            "c1": np.diag([0.0, 1.0]).astype(complex),
        }
    }
    model = KnobModel(space=space, dim=2, rho=rho, resolution=resolution)
    return model, derive_table(model)


class TestOverlapConstraintCheck:
    def test_synthesized_model_trivially_satisfied(self):
        rng = np.random.default_rng(37)
        space = KnobSpace(("a1", "a2", "a3"), ("b1", "b2"), ("c0", "c1", "c2"))
        nu = RelFreqTable.random(space, rng)
        model = synthesize_model(nu).model
        report = check_overlap_constraint(model, nu)
        assert report.all_satisfied
        assert all(e.attained == pytest.approx(0.0, abs=1e-12) for e in report.pairs)

    def test_superposition_model_satisfied_with_positive_overlap(self):
        model, nu = superposition_model()
        report = check_overlap_constraint(model, nu)
        assert report.all_satisfied
        attained = overlap(model.rho["a1"], model.rho["a2"])
        assert attained == pytest.approx(0.5, abs=1e-9)
        assert all(e.bound >= 0.5 - 1e-9 for e in report.pairs)

    def test_corrupted_table_reports_factorization_failure(self):
        model, nu = superposition_model()
        swapped = RelFreqTable(
            nu.space,
            {("a1", "b"): nu.rows[("a2", "b")], ("a2", "b"): nu.rows[("a1", "b")]},
        )
        with pytest.raises(FactorizationError) as err:
            check_overlap_constraint(model, swapped)
        assert err.value.error > 1e-9


class TestSeparationConstraintCheck:
    def test_b_independent_model(self):
        space = KnobSpace(("a",), ("b1", "b2"), ("c0", "c1"))
        resolution = {
            b: {
                "c0": np.diag([1.0, 0.0]).astype(complex),
                "c1": np.diag([0.0, 1.0]).astype(complex),
            }
            for b in space.b_settings
        }
        model = KnobModel(
            space=space, dim=2, rho={"a": pure_density([1, 0])}, resolution=resolution
        )
        report = check_separation_constraint(model, derive_table(model))
        assert report.all_satisfied
        assert all(e.bound == 0.0 and e.attained == pytest.approx(0.0) for e in report.pairs)

    def test_synthesized_norm_exceeds_gap(self):
        space = KnobSpace(("a",), ("b1", "b2"), ("c0", "c1"))
        nu = RelFreqTable(space, {("a", "b1"): [0.9, 0.1], ("a", "b2"): [0.5, 0.5]})
        model = synthesize_model(nu).model
        attained = operator_norm(model.resolution["b1"]["c0"] - model.resolution["b2"]["c0"])
        assert attained >= 0.4 - 1e-9
        assert check_separation_constraint(model, nu).all_satisfied

    def test_property_sweep_over_random_tables(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            na, nb, nc = rng.integers(1, 5), rng.integers(2, 5), rng.integers(2, 5)
            space = KnobSpace(
                tuple(f"a{i}" for i in range(na)),
                tuple(f"b{i}" for i in range(nb)),
                tuple(f"c{i}" for i in range(nc)),
            )
            nu = RelFreqTable.random(space, rng)
            model = synthesize_model(nu).model
            assert check_separation_constraint(model, nu).all_satisfied
            if na > 1:
                assert check_overlap_constraint(model, nu).all_satisfied


class TestBoundReportJson:
    def test_serializes(self):
        model, nu = superposition_model()
        d = check_overlap_constraint(model, nu).to_json_dict()
        assert d["direction"] == "upper"
        assert d["all_satisfied"] is True
        assert d["pairs"] and {"labels", "bound", "attained", "satisfied", "margin"} <= set(
            d["pairs"][0]
        )
