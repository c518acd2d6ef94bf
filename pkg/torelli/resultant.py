"""
Resultant of three ternary cubics (Sylvester's determinantal formula) and the
discriminant of ternary quartics.

Each cubic f_i is split as f_i = sum_j x_j^(nu_j + 1) f_ij for every nu of
degree 2; S(x^nu) = det(f_ij) is then a quartic. The 15x15 matrix of

    T : V1^3 (+) V2 -> V4,  (l1, l2, l3, g) -> l1 f1 + l2 f2 + l3 f3 + S(g)

has determinant Res(f1, f2, f3), normalized by Res(x^3, y^3, z^3) = 1.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Literal, Sequence

from torelli.errors import DegreeMismatchError, IdentityCheckError
from torelli.polycore import (
    Exponent,
    Rational,
    TernaryForm,
    add,
    monomials,
    mul,
    partial_derivative,
)

SplitRule = Literal["greedy", "reverse"]

# Order in which the three slots try to absorb a monomial.
_SLOT_ORDERS: dict[str, tuple[int, int, int]] = {
    "greedy": (0, 1, 2),
    "reverse": (2, 1, 0),
}


# ---------------------------------------------------------------------------
# Exact determinant
# ---------------------------------------------------------------------------

def bareiss_determinant(matrix: Sequence[Sequence[Rational]]) -> Fraction:
    """
    Fraction-free Gaussian elimination.

    Rows are first cleared of denominators, so every division inside the
    elimination is exact integer division.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("determinant needs a square matrix")
    if n == 0:
        return Fraction(1)

    scale = 1
    rows: list[list[int]] = []
    for row in matrix:
        fracs = [Fraction(v) for v in row]
        denom = math.lcm(*(v.denominator for v in fracs))
        rows.append([int(v * denom) for v in fracs])
        scale *= denom

    sign = 1
    previous = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        pivot = rows[k][k]
        for i in range(k + 1, n):
            lead = rows[i][k]
            for j in range(k + 1, n):
                rows[i][j] = (pivot * rows[i][j] - lead * rows[k][j]) // previous
        previous = pivot
    return Fraction(sign * rows[n - 1][n - 1], scale)


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

def split_monomial(
    f: TernaryForm,
    nu: Exponent,
    order: Sequence[int] = (0, 1, 2),
) -> tuple[TernaryForm, TernaryForm, TernaryForm]:
    """
    Quotients (f_1, f_2, f_3) with f = sum_j x_j^(nu_j + 1) f_j.

    Each monomial of f goes to the first slot in `order` whose power divides
    it; some slot always does because |nu| = 2.
    """
    if f.degree != 3:
        raise DegreeMismatchError(f"splitting needs a cubic, got degree {f.degree}")
    if len(nu) != 3 or sum(nu) != 2 or min(nu) < 0:
        raise DegreeMismatchError(f"nu must be an exponent of degree 2, got {nu!r}")

    parts: list[dict[Exponent, Fraction]] = [{}, {}, {}]
    for exp, coeff in f.terms.items():
        for slot in order:
            need = nu[slot] + 1
            if exp[slot] >= need:
                quotient = list(exp)
                quotient[slot] -= need
                parts[slot][tuple(quotient)] = coeff
                break
        else:
            raise IdentityCheckError(f"monomial {exp} not divisible by any x_j^(nu_j+1) for nu={nu}")
    return (
        TernaryForm(2 - nu[0], parts[0]),
        TernaryForm(2 - nu[1], parts[1]),
        TernaryForm(2 - nu[2], parts[2]),
    )


def _det3_forms(rows: Sequence[Sequence[TernaryForm]], degree: int) -> TernaryForm:
    total = TernaryForm.zero(degree)
    for perm in permutations(range(3)):
        inversions = sum(1 for a in range(3) for b in range(a + 1, 3) if perm[a] > perm[b])
        term = mul(mul(rows[0][perm[0]], rows[1][perm[1]]), rows[2][perm[2]])
        total = add(total, term if inversions % 2 == 0 else -term)
    return total


def _g_basis() -> tuple[Exponent, ...]:
    """V2 exponents whose complements (2,2,2) - nu run graded-lex."""
    return tuple(reversed(monomials(2)))


@dataclass(frozen=True)
class SylvesterSystem:
    forms: tuple[TernaryForm, TernaryForm, TernaryForm]
    rule: SplitRule
    # S(x^nu) for each nu of degree 2
    s_images: dict[Exponent, TernaryForm]


def build_system(
    f1: TernaryForm,
    f2: TernaryForm,
    f3: TernaryForm,
    rule: SplitRule = "greedy",
) -> SylvesterSystem:
    forms = (f1, f2, f3)
    for i, f in enumerate(forms, start=1):
        if f.degree != 3:
            raise DegreeMismatchError(f"f{i} must be a cubic, got degree {f.degree}")
    order = _SLOT_ORDERS[rule]
    s_images: dict[Exponent, TernaryForm] = {}
    for nu in monomials(2):
        rows = [split_monomial(f, nu, order) for f in forms]
        for f, row in zip(forms, rows):
            rebuilt = TernaryForm.zero(3)
            for j in range(3):
                power = TernaryForm.monomial(
                    tuple(nu[j] + 1 if k == j else 0 for k in range(3))
                )
                rebuilt = add(rebuilt, mul(power, row[j]))
            if rebuilt != f:
                raise IdentityCheckError(f"splitting does not reproduce the cubic for nu={nu}")
        s_images[nu] = _det3_forms(rows, 4)
    return SylvesterSystem(forms=forms, rule=rule, s_images=s_images)


def sylvester_matrix(system: SylvesterSystem) -> list[list[Fraction]]:
    """Matrix of T; rows are V4 graded-lex, columns l1, l2, l3 (x, y, z each) then g."""
    columns: list[list[Fraction]] = []
    for f in system.forms:
        for unit in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            columns.append(mul(TernaryForm.monomial(unit), f).dense())
    for nu in _g_basis():
        columns.append(system.s_images[nu].dense())
    size = len(monomials(4))
    return [[columns[c][r] for c in range(size)] for r in range(size)]


def resultant3(
    f1: TernaryForm,
    f2: TernaryForm,
    f3: TernaryForm,
    rule: SplitRule = "greedy",
) -> Fraction:
    """Res(f1, f2, f3); zero iff the cubics share a projective zero over an algebraic closure."""
    return bareiss_determinant(sylvester_matrix(build_system(f1, f2, f3, rule)))


def discriminant_quartic(q: TernaryForm, rule: SplitRule = "greedy") -> Fraction:
    """Res(dQ/dx, dQ/dy, dQ/dz); zero iff the plane quartic is singular."""
    if q.degree != 4:
        raise DegreeMismatchError(f"discriminant needs a quartic, got degree {q.degree}")
    return resultant3(
        partial_derivative(q, 1),
        partial_derivative(q, 2),
        partial_derivative(q, 3),
        rule,
    )
