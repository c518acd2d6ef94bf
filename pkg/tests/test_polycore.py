"""
Tests for polycore.py: exact ternary forms, parsing and rendering.

Covers test matrix items:
- 1: parse/render round trip on quartics with rational coefficients
- 2: FormSyntaxError carries the offending position
- 3: InhomogeneousFormError / DegreeMismatchError on bad input
- 4: arithmetic and linear substitution keep forms homogeneous
- 53: Euler identity sum x_i df/dx_i = deg(f) f on random forms
- 54: substitution is a right action, f.(gh) = (f.g).h
"""
from fractions import Fraction

import pytest

from torelli.errors import DegreeMismatchError, FormSyntaxError, InhomogeneousFormError
from torelli.polycore import (
    TernaryForm,
    add,
    basis_index,
    monomials,
    mul,
    parse_form,
    partial_derivative,
    power,
    render,
    substitute_linear,
)


class TestMonomialBasis:
    def test_dimensions(self):
        assert [len(monomials(d)) for d in range(5)] == [1, 3, 6, 10, 15]

    def test_graded_lex_order(self):
        assert monomials(2) == ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))

    def test_basis_index(self):
        assert basis_index((4, 0, 0)) == 0
        assert basis_index((0, 0, 4)) == 14

    def test_negative_degree_is_empty(self):
        assert monomials(-1) == ()


class TestParse:
    def test_fermat(self):
        f = parse_form("x^4+y^4+z^4")
        assert f.degree == 4
        assert f.terms == {(4, 0, 0): 1, (0, 4, 0): 1, (0, 0, 4): 1}

    def test_rational_and_decimal_coefficients(self):
        f = parse_form("3/2*x^2*y^2 - 0.25*z^4")
        assert f.coefficient((2, 2, 0)) == Fraction(3, 2)
        assert f.coefficient((0, 0, 4)) == Fraction(-1, 4)

    def test_expansion_of_powers(self):
        f = parse_form("(x+y)^2")
        assert f.terms == {(2, 0, 0): 1, (1, 1, 0): 2, (0, 2, 0): 1}

    def test_cancellation_to_zero_keeps_requested_degree(self):
        f = parse_form("x^4 - x^4", 4)
        assert f.is_zero()
        assert f.degree == 4

    def test_unary_minus(self):
        assert parse_form("-x*y*z") == TernaryForm(3, {(1, 1, 1): -1})

    @pytest.mark.parametrize("text", ["x^4 + y^3", "x + 1"])
    def test_inhomogeneous_rejected(self, text):
        with pytest.raises(InhomogeneousFormError) as exc_info:
            parse_form(text)
        assert len(exc_info.value.degrees) == 2

    def test_wrong_degree_rejected(self):
        with pytest.raises(DegreeMismatchError):
            parse_form("x^3", 4)


class TestSyntaxErrors:
    def test_unexpected_character_position(self):
        with pytest.raises(FormSyntaxError) as exc_info:
            parse_form("x^4 + w^4")
        assert exc_info.value.position == 6

    def test_division_by_variable(self):
        with pytest.raises(FormSyntaxError, match="non-constant"):
            parse_form("x^4 / y")

    def test_division_by_zero(self):
        with pytest.raises(FormSyntaxError, match="division by zero"):
            parse_form("x^4 / 0")

    def test_missing_parenthesis(self):
        with pytest.raises(FormSyntaxError, match="parenthesis"):
            parse_form("(x + y^4")

    def test_empty_expression(self):
        with pytest.raises(FormSyntaxError):
            parse_form("")

    def test_fractional_exponent(self):
        with pytest.raises(FormSyntaxError, match="exponent"):
            parse_form("x^1.5")

    def test_error_code(self):
        assert FormSyntaxError("bad", 0).code == "polycore.syntax"


class TestRender:
    @pytest.mark.parametrize(
        "text",
        [
            "x^4+y^4+z^4",
            "(x+y)^4 - 3/2*z^4",
            "-x^2*y*z + 7*y^3*z - 0.125*z^4",
            "x^4 + 2*y^2*z^2 + 2*x^2*z^2 + 2*x^2*y^2 + y^4 + z^4",
        ],
    )
    def test_round_trip(self, text):
        f = parse_form(text)
        assert parse_form(render(f)) == f

    def test_zero_renders_as_zero(self):
        assert render(TernaryForm.zero(4)) == "0"

    def test_canonical_text(self):
        assert render(parse_form("z^4 - 1/2*x^4")) == "-(1/2)*x^4 + z^4"


class TestArithmetic:
    def test_add_mismatched_degrees(self):
        with pytest.raises(DegreeMismatchError):
            add(parse_form("x^2"), parse_form("x^3"))

    def test_mul_adds_degrees(self):
        assert mul(parse_form("x+y"), parse_form("x-y")) == parse_form("x^2 - y^2")

    def test_power(self):
        assert power(parse_form("x+y"), 3) == parse_form("(x+y)^3")

    def test_partial_derivatives(self):
        f = parse_form("x^4 + 2*x^2*y^2 + z^4")
        assert partial_derivative(f, 1) == parse_form("4*x^3 + 4*x*y^2")
        assert partial_derivative(f, 2) == parse_form("4*x^2*y")
        assert partial_derivative(f, 3) == parse_form("4*z^3")

    def test_euler_identity(self, rng):
        for _ in range(100):
            degree = rng.randint(1, 6)
            f = TernaryForm.from_dense(degree, [rng.randint(-5, 5) for _ in monomials(degree)])
            total = TernaryForm.zero(degree)
            for axis in (1, 2, 3):
                unit = TernaryForm.monomial(tuple(int(k == axis - 1) for k in range(3)))
                total = add(total, mul(unit, partial_derivative(f, axis)))
            assert total == f.scale(degree)

    def test_dense_round_trip(self):
        f = parse_form("x^4 - 2*x*y*z^2 + 5*z^4")
        assert TernaryForm.from_dense(4, f.dense()) == f

    def test_from_dense_wrong_length(self):
        with pytest.raises(DegreeMismatchError):
            TernaryForm.from_dense(4, [1, 2, 3])


class TestSubstitution:
    def test_identity_substitution(self):
        f = parse_form("x^4 + y^4 + z^4 + x*y*z^2")
        one = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        assert substitute_linear(f, one) == f

    def test_swap(self):
        f = parse_form("x^3*y")
        swap = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
        assert substitute_linear(f, swap) == parse_form("x*y^3")

    def test_shear(self):
        # x -> x + y
        f = parse_form("x^2")
        assert substitute_linear(f, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]) == parse_form("(x+y)^2")

    def test_singular_substitution_keeps_degree(self):
        f = parse_form("x^4 + y^4")
        image = substitute_linear(f, [[1, 0, 0], [1, 0, 0], [0, 0, 0]])
        assert image.degree == 4
        assert image == parse_form("2*x^4")

    def test_right_action(self, rng):
        def random_matrix():
            return [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)] for _ in range(3)]

        for _ in range(20):
            f = TernaryForm.from_dense(4, [rng.randint(-3, 3) for _ in monomials(4)])
            g, h = random_matrix(), random_matrix()
            gh = [[sum(g[i][k] * h[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
            assert substitute_linear(f, gh) == substitute_linear(substitute_linear(f, g), h)
