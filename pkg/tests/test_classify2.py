import pytest

from algebra import ExactMatrix, FieldSpec
from classify2 import (
    IRREDUCIBLE,
    REPEATED,
    SPLIT_DISTINCT,
    SPOT_SAMPLES,
    FamilyKind,
    _rational_certificate,
    basechange_demo,
    build_cor32_family,
    build_cor34_family,
    cor32_as_cor26,
    general_linear_group,
    lemma31_check,
    predicted_maximal_families,
    spectrum_type,
)
from constructions import build_cor26
from errors import ExcludedParameter, NotAnMS, NotNilpotent, ParameterViolation, SquareParameter
from mscore import Method, MsStatus, find_idempotent, trace_zero_space
from subspace import span_of


def unit(f, i, j):
    return ExactMatrix.unit(f, 2, i, j)


class TestSpectra:
    """Root patterns of 2x2 characteristic polynomials."""

    def test_types(self, f5):
        assert spectrum_type(ExactMatrix.diagonal(f5, [1, 2])) == SPLIT_DISTINCT
        assert spectrum_type(ExactMatrix.identity(f5, 2)) == REPEATED
        assert spectrum_type(ExactMatrix.from_rows(f5, [[0, 2], [1, 0]])) == IRREDUCIBLE


class TestTraceNonzeroElements:
    """Trace-nonzero elements of a proper MS of M_2 are invertible."""

    def test_plane(self, f5):
        v = build_cor26(2, 1, 1, 2, f5).subspace
        report = lemma31_check(v)
        assert report.part_i_holds
        assert report.part_ii_applicable
        assert report.part_ii_holds
        assert report.checked == 20

    def test_vacuous_on_trace_zero(self, f5):
        report = lemma31_check(trace_zero_space(2, f5))
        assert report.vacuous
        assert report.part_i_holds

    def test_not_an_ms(self, f5):
        with pytest.raises(NotAnMS):
            lemma31_check(span_of([unit(f5, 0, 0)]))


class TestFamilies:
    """Generators of the classified maximal MSs of M_2."""

    def test_cor32_parameters(self, f5):
        with pytest.raises(ParameterViolation):
            build_cor32_family(2, 2, field=f5)
        with pytest.raises(ParameterViolation):
            build_cor32_family(1, 4, field=f5)
        with pytest.raises(ParameterViolation):
            build_cor32_family(0, 3, field=f5)

    def test_cor32_is_ms(self, f5):
        v = build_cor32_family(1, 2, field=f5)
        assert v.dim == 2
        assert find_idempotent(v) is None

    def test_cor32_matches_two_block_form(self, f5):
        for g in general_linear_group(f5)[::37]:
            assert build_cor32_family(1, 2, g) == cor32_as_cor26(1, 2, g)

    def test_cor34(self, f3):
        c = unit(f3, 0, 1)
        line = build_cor34_family(c)
        assert line == span_of([ExactMatrix.identity(f3, 2) + c])
        with pytest.raises(NotNilpotent):
            build_cor34_family(unit(f3, 0, 0))

    def test_general_linear_group_order(self, f3):
        assert len(general_linear_group(f3)) == 48

    def test_predicted_over_f2(self, f2):
        fams = predicted_maximal_families(f2)
        assert len(fams) == 4
        assert {f.kind for f in fams} == {FamilyKind.CHAR2_PLANE_IN_H}
        ident = ExactMatrix.identity(f2, 2)
        assert all(not f.subspace.contains(ident) for f in fams)

    def test_predicted_over_f3(self, f3):
        fams = predicted_maximal_families(f3)
        kinds = [f.kind for f in fams]
        assert kinds.count(FamilyKind.TRACE_ZERO_HYPERPLANE) == 1
        assert kinds.count(FamilyKind.SPLIT_DIAGONAL_PLUS_NILPOTENT) == 0
        assert kinds.count(FamilyKind.UNIPOTENT_LINE) == 8
        assert fams[0].clause == "i"


class TestBaseChange:
    """An MS over K that is not an MS after adjoining sqrt(s)."""

    def test_f5(self, f5):
        demo = basechange_demo(f5, 2)
        assert demo.base_verdict.status == MsStatus.MS_PROPER
        assert demo.maximal
        assert demo.extension_verdict.status == MsStatus.NOT_MS
        assert demo.flips
        c = demo.c
        assert c @ c == c
        root = demo.extension.element([0, 1])
        expected = (demo.a.embed(demo.extension) + demo.b.embed(demo.extension).scale(root)).scale(2)
        assert c == expected
        assert demo.to_dict()["verdict_flips"]

    def test_rationals(self, rationals):
        demo = basechange_demo(rationals, 2)
        assert demo.base_verdict.method == Method.STRUCTURAL_CERTIFICATE
        assert demo.maximal
        assert demo.flips
        evidence = demo.base_verdict.evidence
        assert evidence["determinant_form"] == ["2", "0", "-1"]
        assert evidence["spot_check"]["samples"] == SPOT_SAMPLES

    def test_isotropic_form_rejected(self, rationals):
        a = ExactMatrix.diagonal(rationals, [1, 4])
        b = ExactMatrix.from_rows(rationals, [[0, 1], [1, 0]])
        with pytest.raises(ParameterViolation):
            _rational_certificate(span_of([a, b]), a, b)

    @pytest.mark.parametrize("s", [0, 1, 4])
    def test_excluded(self, f5, s):
        with pytest.raises(ExcludedParameter):
            basechange_demo(f5, s)

    def test_square(self):
        with pytest.raises(SquareParameter):
            basechange_demo(FieldSpec.prime(7), 2)
