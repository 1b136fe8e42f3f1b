import pytest

from algebra import ExactMatrix, random_matrix
from constructions import build_cor26, build_example22, build_example24
from errors import DirectionInV, FamilyMismatch
from maximality import (
    SPOT_CHECK_MODE,
    WitnessCase,
    certify_maximal,
    decompose,
    maximality_witness,
    spot_directions,
)
from mscore import is_maximal_ms
from subspace import extension_directions, span_of


def unit(f, i, j, n=2):
    return ExactMatrix.unit(f, n, i, j)


@pytest.fixture
def cor26_f5(f5):
    return build_cor26(2, 1, 1, 2, f5)


@pytest.fixture
def ex24_f7(f7):
    return build_example24(1, 1, 1, 1, 2, f7)


class TestWitnessEngine:
    """Explicit idempotents for single directions."""

    def test_case1(self, f5, cor26_f5):
        b = maximality_witness(cor26_f5.family, cor26_f5.subspace, unit(f5, 1, 0))
        assert b.case == WitnessCase.CASE1
        assert b.q == ExactMatrix.from_rows(f5, [[2, 2], [4, 4]])
        assert b.gamma == 4
        assert b.beta == 3
        assert b.v == unit(f5, 0, 1)
        assert b.rank == 1
        assert b.q.trace() == 1

    def test_central(self, f5, cor26_f5):
        b = maximality_witness(cor26_f5.family, cor26_f5.subspace, unit(f5, 1, 1))
        assert b.case == WitnessCase.CENTRAL
        assert b.q == ExactMatrix.identity(f5, 2)
        assert b.gamma == 4

    def test_case2(self, f5, cor26_f5):
        w = unit(f5, 1, 1) + unit(f5, 1, 0)
        b = maximality_witness(cor26_f5.family, cor26_f5.subspace, w)
        assert b.case == WitnessCase.CASE2
        assert b.alpha == 1
        assert b.q == w
        assert cor26_f5.family.core.contains(b.x0)

    def test_case1_transposed(self, f7, ex24_f7):
        b = maximality_witness(ex24_f7.family, ex24_f7.subspace, unit(f7, 1, 2, 3))
        assert b.case == WitnessCase.CASE1_TRANSPOSED
        assert b.q.is_idempotent()
        assert ex24_f7.subspace.contains(b.q - unit(f7, 1, 2, 3).scale(b.gamma))

    def test_decomposition(self, f7, ex24_f7, rng):
        fam = ex24_f7.family
        for _ in range(10):
            w = random_matrix(f7, 3, 3, rng)
            reduced, w0, w1, w2 = decompose(fam, w)
            assert reduced == w0 + w1 + w2
            assert ex24_f7.subspace.contains(w - reduced)

    def test_direction_in_v(self, f5, cor26_f5):
        with pytest.raises(DirectionInV):
            maximality_witness(cor26_f5.family, cor26_f5.subspace, unit(f5, 0, 1))

    def test_wrong_subspace(self, f5, cor26_f5):
        with pytest.raises(FamilyMismatch):
            maximality_witness(cor26_f5.family, span_of([unit(f5, 0, 1)]), unit(f5, 1, 0))

    def test_bundle_json(self, f5, cor26_f5):
        payload = maximality_witness(cor26_f5.family, cor26_f5.subspace, unit(f5, 1, 0)).to_dict()
        assert payload["case"] == "Case1"
        assert payload["Q"]["rows"] == [[2, 2], [4, 4]]
        assert payload["beta"] == 3


class TestCertifyMaximal:
    """Every extension direction witnessed."""

    def test_cor26_f5(self, cor26_f5):
        verdict = certify_maximal(cor26_f5)
        assert verdict.is_maximal
        assert verdict.mode == "exhaustive"
        assert len(verdict.evidence) == 6
        assert verdict.details["cases"] == {"Case1": 1, "Case2": 4, "Central": 1}
        assert is_maximal_ms(cor26_f5.subspace).is_maximal

    def test_ex24_f7_reaches_every_branch(self, ex24_f7):
        verdict = certify_maximal(ex24_f7)
        assert len(verdict.evidence) == 57
        assert verdict.details["cases"] == {
            "Case1": 7, "Case1Transposed": 1, "Case2": 48, "Central": 1,
        }
        for ev in verdict.evidence:
            q = ev.idempotent
            assert q.is_idempotent() and not q.is_zero()
            assert ex24_f7.subspace.extend(ev.direction).contains(q)

    def test_workers_keep_order(self, cor26_f5):
        one = certify_maximal(cor26_f5)
        many = certify_maximal(cor26_f5, workers=4)
        assert [e.direction for e in one.evidence] == [e.direction for e in many.evidence]
        assert [e.idempotent for e in one.evidence] == [e.idempotent for e in many.evidence]

    def test_direction_order_matches_enumeration(self, cor26_f5):
        verdict = certify_maximal(cor26_f5.family)
        assert [e.direction for e in verdict.evidence] == list(extension_directions(cor26_f5.subspace))

    def test_rational_spot_check(self, rationals):
        inst = build_cor26(2, 1, 1, 2, rationals)
        verdict = certify_maximal(inst)
        assert verdict.mode == SPOT_CHECK_MODE
        assert len(verdict.evidence) == len(spot_directions(inst.subspace)) == 3
        assert verdict.details["cases"] == {"Case1": 1, "Case2": 1, "Central": 1}

    def test_not_a_two_block_member(self, f7):
        with pytest.raises(FamilyMismatch):
            certify_maximal(build_example22([1, 1, 1], [1, 2, 3], f7))
