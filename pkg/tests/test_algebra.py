from fractions import Fraction

import numpy as np
import pytest

from algebra import (
    ExactMatrix,
    FieldSpec,
    nullspace,
    power_tail,
    random_matrix,
    rank,
    rank_factorization,
    rank_profile,
)
from errors import FieldError, MixedFields, ShapeMismatch, SingularMatrix, UnsupportedField, ZeroInverse


class TestFieldSpec:
    """Construction and raw arithmetic of the supported fields."""

    def test_prime_field_arithmetic(self, f5):
        assert f5.add(3, 4) == 2
        assert f5.mul(3, 4) == 2
        assert f5.inv(3) == 2
        assert f5.neg(2) == 3
        assert f5.power(2, 4) == 1

    def test_rational_scalars(self, rationals):
        x = rationals.element("1/2") + rationals.element("1/3")
        assert x == Fraction(5, 6)
        assert (x * 6) == 5
        assert x.inverse() == Fraction(6, 5)

    def test_extension_multiplication(self, gf4):
        t = gf4.element([0, 1])
        assert (t * t).value == (1, 1)
        assert t.inverse().value == (1, 1)
        assert (t ** 3) == 1

    def test_fraction_reduces_into_prime_field(self, f5):
        assert f5.coerce(Fraction(1, 2)) == 3
        with pytest.raises(ZeroInverse):
            f5.coerce("1/5")

    @pytest.mark.parametrize("p, modulus", [
        (2, [1, 0, 1]),
        (0, [-1, 0, 1]),
        (3, [2, 1, 0, 1]),
    ])
    def test_reducible_modulus_rejected(self, p, modulus):
        with pytest.raises(FieldError):
            FieldSpec.extension(p, modulus)

    def test_irreducible_rational_modulus_accepted(self):
        f = FieldSpec.extension(0, [-2, 0, 1])
        root = f.element([0, 1])
        assert root * root == 2

    def test_bad_characteristic(self):
        with pytest.raises(FieldError):
            FieldSpec(4)

    def test_non_monic_modulus(self):
        with pytest.raises(FieldError):
            FieldSpec.extension(5, [3, 0, 2])

    def test_elements_in_canonical_order(self, f3, gf4):
        assert list(f3.elements()) == [0, 1, 2]
        assert list(gf4.elements()) == [(0, 0), (1, 0), (0, 1), (1, 1)]

    def test_rationals_cannot_be_enumerated(self, rationals):
        with pytest.raises(UnsupportedField):
            list(rationals.elements())

    def test_is_square(self, f5, rationals):
        assert not f5.is_square(2)
        assert f5.is_square(4)
        assert rationals.is_square(Fraction(9, 4))
        assert not rationals.is_square(Fraction(2))

    def test_literal_round_trip(self, gf25, f7):
        assert FieldSpec.from_literal(gf25.to_literal()) == gf25
        assert FieldSpec.from_literal(f7.to_literal()) == f7

    def test_names(self, f5, rationals):
        assert str(f5) == "F_5"
        assert str(rationals) == "Q"

    def test_zero_inverse(self, f5):
        with pytest.raises(ZeroInverse):
            f5.element(0).inverse()
        with pytest.raises(ZeroDivisionError):
            f5.element(0).inverse()


class TestExactMatrix:
    """Dense exact matrices."""

    def test_matrix_units_multiply(self, f5):
        e01 = ExactMatrix.unit(f5, 2, 0, 1)
        e10 = ExactMatrix.unit(f5, 2, 1, 0)
        assert e01 @ e10 == ExactMatrix.unit(f5, 2, 0, 0)
        assert (e01 @ e01).is_zero()

    def test_trace_and_determinant(self, rationals):
        a = ExactMatrix.from_rows(rationals, [[1, 2], [3, 4]])
        assert a.trace() == 5
        assert a.det() == -2

    def test_inverse(self, f7):
        a = ExactMatrix.from_rows(f7, [[1, 2, 0], [0, 1, 3], [4, 0, 1]])
        assert a @ a.inverse() == ExactMatrix.identity(f7, 3)

    def test_singular_inverse(self, f5):
        a = ExactMatrix.from_rows(f5, [[1, 2], [2, 4]])
        with pytest.raises(SingularMatrix):
            a.inverse()

    def test_star_is_not_the_product(self, f5):
        a = ExactMatrix.identity(f5, 2)
        with pytest.raises(TypeError):
            a * a
        assert (a * 3) == ExactMatrix.diagonal(f5, [3, 3])

    def test_mixed_fields(self, f5, f7):
        with pytest.raises(MixedFields):
            ExactMatrix.identity(f5, 2) + ExactMatrix.identity(f7, 2)

    def test_shape_mismatch(self, f5):
        with pytest.raises(ShapeMismatch):
            ExactMatrix.identity(f5, 2) + ExactMatrix.identity(f5, 3)

    def test_numpy_view(self, f5):
        a = ExactMatrix.from_rows(f5, [[1, 4], [0, 3]])
        assert np.array_equal(a.to_numpy(), np.array([[1, 4], [0, 3]]))
        assert ExactMatrix.from_numpy(f5, a.to_numpy()) == a

    @pytest.mark.parametrize("rows", [[[1, "1/2"], ["-3/4", 0]], [[0, 0], [0, 1]]])
    def test_rational_literal(self, rationals, rows):
        a = ExactMatrix.from_rows(rationals, rows)
        assert ExactMatrix.from_literal(a.to_literal()) == a

    def test_extension_literal(self, gf25):
        a = ExactMatrix.from_rows(gf25, [[[1, 2], 0], [[0, 1], [4, 4]]])
        assert ExactMatrix.from_literal(a.to_literal()) == a

    def test_embed_respects_products(self, f5, gf25):
        a = ExactMatrix.from_rows(f5, [[1, 2], [3, 4]])
        b = ExactMatrix.from_rows(f5, [[0, 1], [1, 0]])
        assert a.embed(gf25) @ b.embed(gf25) == (a @ b).embed(gf25)

    def test_power(self, f3):
        a = ExactMatrix.from_rows(f3, [[1, 1], [0, 1]])
        assert a.power(3) == ExactMatrix.identity(f3, 2)
        assert a.power(-1) == a.inverse()


class TestRankAndTails:
    """Rank profiles, power tails and the rank factorisation."""

    def test_rank_profile(self, rationals):
        prof = rank_profile(ExactMatrix.from_rows(rationals, [[1, 2], [2, 4]]))
        assert prof.rank == 1
        assert prof.pivots == (0,)
        assert prof.rref == ExactMatrix.from_rows(rationals, [[1, 2], [0, 0]])

    def test_nullspace(self, f5):
        basis = nullspace(f5, [[1, 1, 1]], 3)
        assert len(basis) == 2
        for vec in basis:
            assert f5.dot([1, 1, 1], vec) == 0

    def test_power_tail_of_idempotent(self, f5):
        tail = power_tail(ExactMatrix.unit(f5, 2, 0, 0))
        assert (tail.preperiod, tail.period) == (1, 1)

    def test_power_tail_of_nilpotent(self, f5):
        tail = power_tail(ExactMatrix.unit(f5, 2, 0, 1))
        assert (tail.preperiod, tail.period) == (2, 1)
        assert tail.idempotent_power().is_zero()

    def test_power_tail_of_permutation(self, f2):
        p = ExactMatrix.from_rows(f2, [[0, 1], [1, 0]])
        tail = power_tail(p)
        assert (tail.preperiod, tail.period) == (1, 2)
        assert tail.cycle == (p, ExactMatrix.identity(f2, 2))
        assert tail.idempotent_power() == ExactMatrix.identity(f2, 2)

    def test_power_tail_needs_finite_field(self, rationals):
        with pytest.raises(UnsupportedField):
            power_tail(ExactMatrix.identity(rationals, 2))

    def test_zero_matrix_factorisation(self, f5):
        b = rank_factorization(ExactMatrix.zeros(f5, 2, 3))
        assert b.shape == (3, 2)
        assert b.is_zero()

    @pytest.mark.parametrize("which", ["f5", "rationals"])
    def test_rank_factorization_properties(self, which, request):
        f = request.getfixturevalue(which)
        rng = np.random.default_rng(2024)
        for _ in range(500):
            m, k = (int(x) for x in rng.integers(1, 7, size=2))
            if rng.random() < 0.5:
                r = int(rng.integers(1, min(m, k) + 1))
                a = random_matrix(f, m, r, rng) @ random_matrix(f, r, k, rng)
            else:
                a = random_matrix(f, m, k, rng)
            b = rank_factorization(a)
            assert b.shape == (k, m)
            assert a @ b @ a == a
            assert b @ a @ b == b
            assert (a @ b).is_idempotent()
            assert (b @ a).is_idempotent()
            assert rank(a @ b) == rank(a)


class TestFieldAxioms:
    """Associativity, distributivity and inverses on seeded random triples."""

    @pytest.fixture(params=["f7", "gf25", "rationals", "q_sqrt2"])
    def field(self, request):
        if request.param == "q_sqrt2":
            return FieldSpec.extension(0, [-2, 0, 1])
        return request.getfixturevalue(request.param)

    def test_axioms(self, field):
        rng = np.random.default_rng(11)
        for _ in range(200):
            a, b, c = (field.random(rng) for _ in range(3))
            assert field.add(field.add(a, b), c) == field.add(a, field.add(b, c))
            assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
            assert field.mul(a, field.add(b, c)) == field.add(field.mul(a, b), field.mul(a, c))
            assert field.add(a, field.neg(a)) == field.zero
            if a != field.zero:
                assert field.mul(a, field.inv(a)) == field.one


class TestExactLiterals:
    """Entries that are not exact field elements are refused."""

    @pytest.mark.parametrize("bad", [2.5, 2.0, True, None, "x"])
    def test_prime_field_entry(self, bad):
        with pytest.raises(FieldError):
            ExactMatrix.from_literal({"p": 5, "rows": [[bad, 0], [0, 1]]})

    def test_rational_entry(self, rationals):
        with pytest.raises(FieldError):
            ExactMatrix.from_rows(rationals, [[0.5, 0], [0, 1]])

    def test_extension_coefficient(self, gf25):
        with pytest.raises(FieldError):
            gf25.coerce([1.5, 0])

    def test_numpy_floats(self, f5):
        with pytest.raises(FieldError):
            ExactMatrix.from_numpy(f5, np.array([[2.5, 0.0], [0.0, 1.0]]))

    def test_exact_forms_still_accepted(self, f5):
        a = ExactMatrix.from_rows(f5, [[np.int64(7), "1/2"], [Fraction(3), -1]])
        assert a == ExactMatrix.from_rows(f5, [[2, 3], [3, 4]])


def _brute_tail(a, limit):
    powers = [None] + [a.power(j) for j in range(1, limit)]
    for mu in range(1, limit):
        for lam in range(1, limit - mu):
            if powers[mu + lam] == powers[mu]:
                return mu, lam
    raise AssertionError("no repetition below the limit")


class TestPowerTailMinimality:
    """The recorded (preperiod, period) is the least pair found by direct search."""

    def test_diagonal_over_f5(self, f5):
        a = ExactMatrix.diagonal(f5, [1, 2])
        tail = power_tail(a)
        assert (tail.preperiod, tail.period) == (1, 4)
        assert tail.idempotent_power() == ExactMatrix.identity(f5, 2)

    @pytest.mark.parametrize("which", ["f2", "f3", "f5"])
    def test_random_two_by_two(self, which, request):
        f = request.getfixturevalue(which)
        q = f.order
        rng = np.random.default_rng(5)
        for _ in range(40):
            a = random_matrix(f, 2, 2, rng)
            tail = power_tail(a)
            assert (tail.preperiod, tail.period) == _brute_tail(a, q * q + 4)
            e = tail.idempotent_power()
            assert e.is_idempotent()

    def test_rref_is_a_fixed_point(self, f5, rationals):
        rng = np.random.default_rng(8)
        for f in (f5, rationals):
            for _ in range(50):
                a = random_matrix(f, 3, 4, rng)
                prof = rank_profile(a)
                again = rank_profile(prof.rref)
                assert again.rref == prof.rref
                assert again.pivots == prof.pivots
