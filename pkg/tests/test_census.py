import numpy as np
import pytest

from census import (
    debondt_sample,
    enumerate_matrix_subspaces,
    enumerate_subspaces,
    gaussian_binomial,
    ms_census,
    oracle_compare,
    random_subspace,
)
from classify2 import predicted_maximal_families
from errors import BudgetExceeded, ParameterViolation, UnsupportedField
from mscore import trace_zero_space
from report import dump_json, verify_census_witnesses


class TestEnumeration:
    """Reduced echelon enumeration of subspaces."""

    @pytest.mark.parametrize("d, k, q, expected", [
        (4, 2, 2, 35),
        (4, 2, 3, 130),
        (4, 1, 5, 156),
        (4, 3, 3, 40),
        (4, 0, 7, 1),
        (4, 5, 2, 0),
    ])
    def test_gaussian_binomial(self, d, k, q, expected):
        assert gaussian_binomial(d, k, q) == expected

    @pytest.mark.parametrize("k", range(5))
    def test_counts_over_f2(self, f2, k):
        subspaces = list(enumerate_matrix_subspaces(f2, 2, k))
        assert len(subspaces) == gaussian_binomial(4, k, 2)
        assert len(set(subspaces)) == len(subspaces)
        assert all(s.dim == k for s in subspaces)

    def test_enumerated_bases_are_canonical(self, f3):
        for s in enumerate_matrix_subspaces(f3, 2, 2):
            rebuilt = type(s).from_vectors(f3, 2, s.rows)
            assert rebuilt.rows == s.rows

    def test_budget(self, f5):
        with pytest.raises(BudgetExceeded):
            list(enumerate_subspaces(f5, 9, 4, budget=100))

    def test_infinite_field(self, rationals):
        with pytest.raises(UnsupportedField):
            list(enumerate_subspaces(rationals, 4, 1))

    def test_random_subspace_is_seeded(self, f5):
        a = random_subspace(f5, 2, np.random.default_rng(7))
        b = random_subspace(f5, 2, np.random.default_rng(7))
        assert a == b
        assert random_subspace(f5, 3, np.random.default_rng(1), dim=7).dim == 7


class TestOracle:
    """Definition against the idempotent criterion."""

    def test_all_proper_subspaces_over_f2(self, f2):
        report = oracle_compare(2, f2)
        assert report.total_subspaces == 66
        assert report.counts_match
        assert report.oracle_agreement
        assert report.disagreements == []
        table = report.agreement_table()
        assert table.values.sum() == 66

    def test_agreement_table_layout(self, f2):
        table = oracle_compare(2, f2).agreement_table()
        assert list(table.index) == ["MS", "NotMS"]
        assert list(table.columns) == ["MS", "NotMS"]
        assert table.loc["MS", "NotMS"] == 0
        assert table.loc["NotMS", "MS"] == 0

    def test_empty_sample(self, f2):
        report = oracle_compare(2, f2, sample=0)
        assert report.total_subspaces == 0
        assert report.agreement_table().shape == (2, 2)
        assert report.to_dict()["agreement_table"] == {
            "MS": {"MS": 0, "NotMS": 0},
            "NotMS": {"MS": 0, "NotMS": 0},
        }

    def test_sampled(self, f2):
        report = oracle_compare(2, f2, sample=20, seed=3)
        assert report.total_subspaces == 20
        assert report.sample == {"size": 20, "seed": 3}
        assert report.oracle_agreement

    @pytest.mark.slow
    def test_all_proper_subspaces_over_f3(self, f3):
        report = oracle_compare(2, f3, workers=4)
        assert report.total_subspaces == 211
        assert report.oracle_agreement


class TestCensus:
    """MS and maximal-MS tallies of M_2(F_q)."""

    def test_f2(self, f2):
        report = ms_census(2, f2, compare_classification=True)
        assert report.total_subspaces == 67
        assert report.hyperplanes == {"total": 15, "ms": 0, "only_trace_zero": False}
        assert report.dims[1]["maximal"] == 0
        assert report.lemma31_violations == []
        assert report.heredity_violations == []
        cls = report.classification
        assert cls["predicted"] == 4
        assert cls["misses"] == []
        assert cls["extras"] == []
        assert cls["exact_match"]
        assert report.affirmative

    def test_f2_report_shapes(self, f2):
        report = ms_census(2, f2, check_heredity=False)
        frame = report.to_frame()
        assert list(frame["dim"]) == [0, 1, 2, 3, 4]
        assert list(frame["subspaces"]) == [1, 15, 35, 15, 1]
        payload = report.to_dict()
        assert payload["counts_match_gaussian_binomial"]
        assert verify_census_witnesses(payload) == len(report.witnesses)

    @pytest.mark.slow
    def test_f3(self, f3):
        report = ms_census(2, f3, workers=4)
        assert report.hyperplanes == {"total": 40, "ms": 1, "only_trace_zero": True}
        assert trace_zero_space(2, f3) in report.maximal
        assert report.affirmative

    @pytest.mark.slow
    def test_f5_classification(self, f5):
        report = ms_census(2, f5, compare_classification=True, workers=4)
        assert report.hyperplanes == {"total": 156, "ms": 1, "only_trace_zero": True}
        cls = report.classification
        assert cls["misses"] == []
        assert cls["all_extras_have_irreducible_spectrum"]
        assert report.lemma31_violations == []

    def test_classification_needs_m2(self, f2):
        with pytest.raises(UnsupportedField):
            ms_census(1, f2, compare_classification=True)


class TestSampling:
    """Seeded low-codimension subspaces of M_3."""

    def test_small_sample(self, f5):
        report = debondt_sample(f5, n=3, samples=4, seed=42)
        assert report.affirmative
        assert report.with_idempotent == 4

    @pytest.mark.slow
    def test_full_sample(self, f5):
        report = debondt_sample(f5, n=3, samples=200, seed=42, workers=4)
        assert report.counterexamples == []

    def test_characteristic_below_n(self, f2):
        with pytest.raises(ParameterViolation):
            debondt_sample(f2, n=3, samples=1)

    def test_codimension_range(self, f5):
        with pytest.raises(ParameterViolation):
            debondt_sample(f5, n=3, samples=1, codim=3)


class TestReproducibility:
    """Same seed, same bytes."""

    def test_census_json(self, f2):
        first = dump_json(ms_census(2, f2, compare_classification=True).to_dict())
        second = dump_json(ms_census(2, f2, compare_classification=True, workers=3).to_dict())
        assert first == second

    def test_oracle_sample_json(self, f3):
        first = dump_json(oracle_compare(2, f3, sample=15, seed=5).to_dict())
        second = dump_json(oracle_compare(2, f3, sample=15, seed=5).to_dict())
        assert first == second

    def test_debondt_json(self, f5):
        first = dump_json(debondt_sample(f5, n=3, samples=4, seed=9).to_dict())
        second = dump_json(debondt_sample(f5, n=3, samples=4, seed=9, workers=2).to_dict())
        assert first == second

    def test_predicted_families_are_reused(self, f2, monkeypatch):
        def refuse(field):
            raise AssertionError("classification recomputed")

        monkeypatch.setattr("census.predicted_maximal_families", refuse)
        predicted = predicted_maximal_families(f2)
        report = ms_census(2, f2, compare_classification=True, predicted=predicted)
        assert report.classification["predicted"] == 4
