"""
Tests for resultant.py: Sylvester determinant, resultant and quartic discriminant.

Covers test matrix items:
- 5: Res(x^3, y^3, z^3) = 1 and Disc(x^4 + y^4 + z^4) = 2^54
- 6: both split rules give the same resultant, on 50 seeded random cubic triples too
- 7: GL3 invariance Disc(Q.g) = det(g)^36 Disc(Q)
- 8: vanishing on cubics with a common zero, singular quartics
- 9: degree errors
"""
from fractions import Fraction

import pytest

from torelli.ciani import ciani_form, determinant, random_ciani_matrix
from torelli.errors import DegreeMismatchError
from torelli.polycore import TernaryForm, parse_form, substitute_linear
from torelli.resultant import (
    bareiss_determinant,
    build_system,
    discriminant_quartic,
    resultant3,
    split_monomial,
    sylvester_matrix,
)


def _cubes() -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    return parse_form("x^3"), parse_form("y^3"), parse_form("z^3")


class TestBareiss:
    def test_empty_matrix(self):
        assert bareiss_determinant([]) == 1

    def test_small_integer(self):
        assert bareiss_determinant([[2, 1], [7, 4]]) == 1

    def test_rational_entries(self):
        assert bareiss_determinant([[Fraction(1, 2), 0], [0, Fraction(2, 3)]]) == Fraction(1, 3)

    def test_pivot_swap_changes_sign(self):
        assert bareiss_determinant([[0, 1], [1, 0]]) == -1

    def test_singular(self):
        assert bareiss_determinant([[1, 2, 3], [2, 4, 6], [0, 1, 1]]) == 0

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            bareiss_determinant([[1, 2, 3], [4, 5, 6]])


class TestSplitMonomial:
    def test_pure_cube_goes_to_last_slot(self):
        f1, f2, f3 = split_monomial(parse_form("z^3"), (0, 0, 2))
        assert f1.is_zero() and f2.is_zero()
        assert f3 == TernaryForm.monomial((0, 0, 0))

    def test_reconstruction(self):
        f = parse_form("x^3 + x*y*z + y^2*z - 2*z^3")
        for nu in ((2, 0, 0), (1, 1, 0), (0, 1, 1)):
            parts = split_monomial(f, nu)
            rebuilt = TernaryForm.zero(3)
            for j, part in enumerate(parts):
                power = TernaryForm.monomial(tuple(nu[j] + 1 if k == j else 0 for k in range(3)))
                rebuilt = rebuilt + power * part
            assert rebuilt == f

    def test_quotient_degrees(self):
        parts = split_monomial(parse_form("x*y*z"), (1, 0, 1))
        assert [p.degree for p in parts] == [1, 2, 1]

    def test_needs_cubic(self):
        with pytest.raises(DegreeMismatchError):
            split_monomial(parse_form("x^4"), (2, 0, 0))

    def test_nu_degree_checked(self):
        with pytest.raises(DegreeMismatchError):
            split_monomial(parse_form("x^3"), (1, 0, 0))


class TestSylvesterMatrix:
    def test_shape(self):
        matrix = sylvester_matrix(build_system(*_cubes()))
        assert len(matrix) == 15 and all(len(row) == 15 for row in matrix)

    def test_cubes_give_identity_determinant(self):
        assert bareiss_determinant(sylvester_matrix(build_system(*_cubes()))) == 1

    def test_s_images_are_quartics(self):
        system = build_system(*_cubes())
        assert len(system.s_images) == 6
        assert all(s.degree == 4 for s in system.s_images.values())


class TestResultant:
    def test_normalization(self):
        assert resultant3(*_cubes()) == 1

    def test_scaling_degree_nine(self):
        f1, f2, f3 = _cubes()
        assert resultant3(f1.scale(2), f2, f3) == 2**9

    def test_common_zero_gives_zero(self):
        # all three vanish at (0 : 0 : 1)
        assert resultant3(parse_form("x^3"), parse_form("y^3"), parse_form("(x+y)^3 + x*z^2")) == 0

    @pytest.mark.parametrize("rule", ["greedy", "reverse"])
    def test_rules_agree_on_generic_cubics(self, rule):
        f1 = parse_form("x^3 + y^2*z - z^3")
        f2 = parse_form("y^3 - x*z^2 + 2*x*y*z")
        f3 = parse_form("z^3 + x^2*y + 3*y^3")
        assert resultant3(f1, f2, f3, rule) == resultant3(f1, f2, f3, "greedy")

    def test_rules_agree_on_random_cubics(self, rng):
        for _ in range(50):
            f1, f2, f3 = (TernaryForm.from_dense(3, [rng.randint(-3, 3) for _ in range(10)]) for _ in range(3))
            assert resultant3(f1, f2, f3, "greedy") == resultant3(f1, f2, f3, "reverse")

    def test_requires_cubics(self):
        with pytest.raises(DegreeMismatchError):
            resultant3(parse_form("x^2"), parse_form("y^3"), parse_form("z^3"))


class TestDiscriminant:
    def test_fermat(self):
        assert discriminant_quartic(parse_form("x^4+y^4+z^4")) == 2**54

    def test_fermat_reverse_rule(self):
        assert discriminant_quartic(parse_form("x^4+y^4+z^4"), "reverse") == 2**54

    def test_singular_quartic(self):
        # (x^2 + y^2 + z^2)^2 is singular along a conic
        assert discriminant_quartic(parse_form("(x^2 + y^2 + z^2)^2")) == 0

    def test_needs_quartic(self):
        with pytest.raises(DegreeMismatchError):
            discriminant_quartic(parse_form("x^3"))

    def test_rules_agree_on_ciani_quartics(self, rng):
        for _ in range(3):
            q = ciani_form(random_ciani_matrix(rng))
            assert discriminant_quartic(q, "greedy") == discriminant_quartic(q, "reverse")

    def test_gl3_invariance(self, rng):
        for _ in range(20):
            q = ciani_form(random_ciani_matrix(rng, bound=3))
            while True:
                g = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
                if determinant(g) != 0:
                    break
            assert discriminant_quartic(substitute_linear(q, g)) == determinant(g) ** 36 * discriminant_quartic(q)
