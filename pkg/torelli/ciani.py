"""
Ciani quartics, symmetric 3x3 matrices and triples of elliptic curves.

A symmetric matrix

    m = [[a1, b3, b2],
         [b3, a2, b1],
         [b2, b1, a3]]

gives the quartic Q_m = a1 x^4 + a2 y^4 + a3 z^4 + 2(b1 y^2 z^2 + b2 x^2 z^2 + b3 x^2 y^2)
and the curves E_i : y^2 = x(x^2 - 4 b_i x - 4 c_i), c_i = a_j a_k - b_i^2 for
(i, j, k) cyclic. Everything here is exact over Q.
"""
import math
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence

from mpmath import mp

from torelli.errors import (
    IdentityCheckError,
    InvalidMarkedTripleError,
    NotInCianiDomainError,
    RootProductError,
)
from torelli.polycore import Rational, TernaryForm
from torelli.resultant import bareiss_determinant

Triple = tuple[Fraction, Fraction, Fraction]
RationalMatrix = list[list[Fraction]]

# (i, j, k) cyclic, zero-based
_CYCLIC: tuple[tuple[int, int, int], ...] = ((0, 1, 2), (1, 2, 0), (2, 0, 1))


def _triple(values: Sequence[Rational]) -> Triple:
    if len(values) != 3:
        raise ValueError(f"expected three entries, got {len(values)}")
    return (Fraction(values[0]), Fraction(values[1]), Fraction(values[2]))


def _prod(values: Sequence[Fraction]) -> Fraction:
    out = Fraction(1)
    for v in values:
        out *= v
    return out


# ---------------------------------------------------------------------------
# CianiMatrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CianiMatrix:
    a: Triple
    b: Triple

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _triple(self.a))
        object.__setattr__(self, "b", _triple(self.b))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Rational]]) -> "CianiMatrix":
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("a Ciani matrix is 3x3")
        m = [[Fraction(v) for v in r] for r in rows]
        for i in range(3):
            for j in range(i + 1, 3):
                if m[i][j] != m[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        return cls(a=(m[0][0], m[1][1], m[2][2]), b=(m[1][2], m[0][2], m[0][1]))

    def rows(self) -> RationalMatrix:
        a1, a2, a3 = self.a
        b1, b2, b3 = self.b
        return [[a1, b3, b2], [b3, a2, b1], [b2, b1, a3]]

    @property
    def c(self) -> Triple:
        """c_i = a_j a_k - b_i^2, the cofactor of a_i."""
        return tuple(self.a[j] * self.a[k] - self.b[i] ** 2 for i, j, k in _CYCLIC)

    @property
    def det(self) -> Fraction:
        a1, a2, a3 = self.a
        b1, b2, b3 = self.b
        return a1 * a2 * a3 + 2 * b1 * b2 * b3 - a1 * b1**2 - a2 * b2**2 - a3 * b3**2

    @property
    def in_s(self) -> bool:
        return _prod(self.a) != 0 and _prod(self.c) != 0

    @property
    def in_s_times(self) -> bool:
        return self.in_s and self.det != 0

    def scaled(self, factor: Rational) -> "CianiMatrix":
        factor = Fraction(factor)
        return CianiMatrix(a=tuple(factor * v for v in self.a), b=tuple(factor * v for v in self.b))


IDENTITY = CianiMatrix(a=(1, 1, 1), b=(0, 0, 0))


def ciani_form(m: CianiMatrix) -> TernaryForm:
    a1, a2, a3 = m.a
    b1, b2, b3 = m.b
    return TernaryForm(4, {
        (4, 0, 0): a1,
        (0, 4, 0): a2,
        (0, 0, 4): a3,
        (0, 2, 2): 2 * b1,
        (2, 0, 2): 2 * b2,
        (2, 2, 0): 2 * b3,
    })


def ciani_matrix_of(q: TernaryForm) -> CianiMatrix:
    """Inverse of ciani_form on Ciani quartics."""
    allowed = {(4, 0, 0), (0, 4, 0), (0, 0, 4), (0, 2, 2), (2, 0, 2), (2, 2, 0)}
    if q.degree != 4 or any(exp not in allowed for exp in q.terms):
        raise ValueError("not a Ciani quartic: only x^4, y^4, z^4, y^2z^2, x^2z^2, x^2y^2 may occur")
    return CianiMatrix(
        a=(q.coefficient((4, 0, 0)), q.coefficient((0, 4, 0)), q.coefficient((0, 0, 4))),
        b=(
            q.coefficient((0, 2, 2)) / 2,
            q.coefficient((2, 0, 2)) / 2,
            q.coefficient((2, 2, 0)) / 2,
        ),
    )


def closed_discriminant(m: CianiMatrix) -> Fraction:
    """D(m) = a1 a2 a3 (c1 c2 c3)^2 det(m)^4; Disc(Q_m) = 2^54 D(m)."""
    return _prod(m.a) * _prod(m.c) ** 2 * m.det**4


def cofactor(rows: Sequence[Sequence[Rational]]) -> RationalMatrix:
    """Cofactor matrix of a 3x3 matrix: entry (i, j) is (-1)^(i+j) times the (i, j) minor."""
    m = [[Fraction(v) for v in r] for r in rows]
    out: RationalMatrix = [[Fraction(0)] * 3 for _ in range(3)]
    for i in range(3):
        r0, r1 = [r for r in range(3) if r != i]
        for j in range(3):
            c0, c1 = [c for c in range(3) if c != j]
            minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
            out[i][j] = minor if (i + j) % 2 == 0 else -minor
    return out


def cofactor_matrix(m: CianiMatrix) -> CianiMatrix:
    """Cof m as a Ciani matrix: diagonal (c1, c2, c3), off-diagonal the b-cofactors."""
    return CianiMatrix.from_rows(cofactor(m.rows()))


def determinant(rows: Sequence[Sequence[Rational]]) -> Fraction:
    return bareiss_determinant(rows)


# ---------------------------------------------------------------------------
# Elliptic triples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticTriple:
    """E_i : y^2 = x(x^2 - 4 b_i x - 4 c_i) for i = 1, 2, 3."""
    b: Triple
    c: Triple

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", _triple(self.b))
        object.__setattr__(self, "c", _triple(self.c))
        for i in range(3):
            if self.c[i] == 0:
                raise InvalidMarkedTripleError(f"c_{i + 1} = 0: E_{i + 1} is singular")
            if self.delta[i] == 0:
                raise InvalidMarkedTripleError(f"delta_{i + 1} = b^2 + c = 0: E_{i + 1} is singular")

    @property
    def delta(self) -> Triple:
        return tuple(b * b + c for b, c in zip(self.b, self.c))

    @property
    def discriminants(self) -> Triple:
        return tuple(2**12 * c * c * d for c, d in zip(self.c, self.delta))

    @property
    def delta_product(self) -> Fraction:
        return _prod(self.delta)


@dataclass(frozen=True)
class MarkedTriple:
    base: EllipticTriple
    rho: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", Fraction(self.rho))
        if self.rho**2 != self.base.delta_product:
            raise InvalidMarkedTripleError(
                f"rho^2 = {self.rho**2} differs from delta_1 delta_2 delta_3 = {self.base.delta_product}"
            )


def mat_of(marked: MarkedTriple) -> CianiMatrix:
    """Mat(A, rho): diagonal rho / delta_i, off-diagonal b_i."""
    delta = marked.base.delta
    return CianiMatrix(a=tuple(marked.rho / d for d in delta), b=marked.base.b)


def ab_of(m: CianiMatrix) -> MarkedTriple:
    if not m.in_s:
        raise NotInCianiDomainError(
            f"matrix is outside S: a1 a2 a3 = {_prod(m.a)}, c1 c2 c3 = {_prod(m.c)}"
        )
    base = EllipticTriple(b=m.b, c=m.c)
    rho = _prod(m.a)
    if base.delta_product != rho**2:
        raise IdentityCheckError("delta(A) differs from (a1 a2 a3)^2")
    return MarkedTriple(base=base, rho=rho)


# ---------------------------------------------------------------------------
# Invariants and classification
# ---------------------------------------------------------------------------

def t_invariant(marked: MarkedTriple) -> Fraction:
    """T(A, rho) = det Mat(A, rho)."""
    value = mat_of(marked).det
    b1, b2, b3 = marked.base.b
    expanded = 2 * b1 * b2 * b3 - marked.rho * (
        sum(b * b / d for b, d in zip(marked.base.b, marked.base.delta)) - 1
    )
    if value != expanded:
        raise IdentityCheckError(f"T expansion mismatch: det = {value}, expanded = {expanded}")
    return value


def x_invariant(m: CianiMatrix) -> Fraction:
    """X(m) = (a1 a2 a3)^4 (c1 c2 c3)^2 det m."""
    return _prod(m.a) ** 4 * _prod(m.c) ** 2 * m.det


def is_square_rational(q: Rational) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    num, den = q.numerator, q.denominator
    return math.isqrt(num) ** 2 == num and math.isqrt(den) ** 2 == den


class CianiLabel(str, Enum):
    HYPERELLIPTIC = "HyperellipticJacobian"
    NON_HYPERELLIPTIC = "NonHyperellipticJacobian"
    TWIST = "QuadraticTwistObstruction"


@dataclass(frozen=True)
class Twist:
    d: Fraction
    matrix: CianiMatrix
    curves: EllipticTriple


@dataclass(frozen=True)
class Classification:
    label: CianiLabel
    t: Fraction
    square: bool
    twist: Twist | None = None


def twist(m: CianiMatrix, d: Rational) -> Twist:
    """m_d = d m, carrying E_i to y^2 = x(x^2 - 4 b_i d x - 4 c_i d^2)."""
    d = Fraction(d)
    if d == 0:
        raise ValueError("twist parameter must be nonzero")
    scaled = m.scaled(d)
    curves = EllipticTriple(b=tuple(b * d for b in m.b), c=tuple(c * d * d for c in m.c))
    if scaled.det != d**3 * m.det:
        raise IdentityCheckError("det(d m) differs from d^3 det m")
    if ab_of(scaled).base != curves:
        raise IdentityCheckError("twisted curves differ from Ab(d m)")
    return Twist(d=d, matrix=scaled, curves=curves)


def classify(marked: MarkedTriple) -> Classification:
    m = mat_of(marked)
    if not m.in_s:
        raise NotInCianiDomainError("Mat(A, rho) lies outside S")
    t = t_invariant(marked)
    if t == 0:
        return Classification(label=CianiLabel.HYPERELLIPTIC, t=t, square=True)
    if is_square_rational(t):
        return Classification(label=CianiLabel.NON_HYPERELLIPTIC, t=t, square=True)
    return Classification(label=CianiLabel.TWIST, t=t, square=False, twist=twist(m, t))


def quotient_curves(m: CianiMatrix) -> tuple[tuple[Fraction, Fraction], ...]:
    """
    Coefficients (d_i, a_i det m) of F_i : y^2 = x(x^2 - 4 d_i x - 4 a_i det m),
    with d_i the off-diagonal entries of Cof m.
    """
    if not m.in_s_times:
        raise NotInCianiDomainError("quotient curves need m in S with det m != 0")
    cof = cofactor_matrix(m)
    pairs = tuple((cof.b[i], m.a[i] * m.det) for i in range(3))
    marked = ab_of(cof)
    if marked.base.b != cof.b or marked.base.c != tuple(c for _, c in pairs):
        raise IdentityCheckError("Ab(Cof m) does not match the quotient curves")
    if marked.rho != _prod(m.c):
        raise IdentityCheckError("rho(Cof m) differs from c1 c2 c3")
    return pairs


# ---------------------------------------------------------------------------
# Two-torsion subgroup W
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadraticNumber:
    """rational + surd * sqrt(radicand), sqrt the principal branch; folded to Q when possible."""
    rational: Fraction
    surd: Fraction = Fraction(0)
    radicand: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        rational, surd, radicand = Fraction(self.rational), Fraction(self.surd), Fraction(self.radicand)
        if surd != 0 and radicand >= 0 and is_square_rational(radicand):
            root = Fraction(math.isqrt(radicand.numerator), math.isqrt(radicand.denominator))
            rational, surd, radicand = rational + surd * root, Fraction(0), Fraction(0)
        if surd == 0 or radicand == 0:
            surd, radicand = Fraction(0), Fraction(0)
        object.__setattr__(self, "rational", rational)
        object.__setattr__(self, "surd", surd)
        object.__setattr__(self, "radicand", radicand)

    @property
    def is_rational(self) -> bool:
        return self.surd == 0

    def numeric(self):
        return mp.mpf(self.rational.numerator) / self.rational.denominator + (
            mp.mpf(self.surd.numerator) / self.surd.denominator
        ) * mp.sqrt(mp.mpf(self.radicand.numerator) / self.radicand.denominator)

    def __str__(self) -> str:
        if self.is_rational:
            return str(self.rational)
        sign = "-" if self.surd < 0 else "+"
        return f"{self.rational} {sign} {abs(self.surd)}*sqrt({self.radicand})"


@dataclass(frozen=True)
class TwoTorsionPoint:
    label: str                       # "O", "Q", "P" or "R"
    x: QuadraticNumber | None        # None for the point at infinity

    def __str__(self) -> str:
        return "O" if self.x is None else f"({self.x}, 0)"


W_PATTERN: tuple[tuple[str, str, str], ...] = (
    ("O", "O", "O"),
    ("O", "Q", "Q"),
    ("Q", "O", "Q"),
    ("Q", "Q", "O"),
    ("P", "P", "P"),
    ("P", "R", "R"),
    ("R", "P", "R"),
    ("R", "R", "P"),
)


@dataclass(frozen=True)
class WSubgroup:
    elements: tuple[tuple[TwoTorsionPoint, TwoTorsionPoint, TwoTorsionPoint], ...]

    def coordinate_set(self) -> frozenset:
        return frozenset(tuple(p.x for p in element) for element in self.elements)


def _on_curve(x: QuadraticNumber, b: Fraction, c: Fraction) -> bool:
    """x(x^2 - 4bx - 4c) = 0 in Q(sqrt(radicand))."""
    r, s, d = x.rational, x.surd, x.radicand
    if r == 0 and s == 0:
        return True
    return r * r + s * s * d - 4 * b * r - 4 * c == 0 and 2 * r * s - 4 * b * s == 0


def _root_product_sign(marked: MarkedTriple, signs: Sequence[int]) -> int:
    """+1 if prod s_i sqrt(delta_i) = rho, -1 if it equals -rho."""
    roots = [QuadraticNumber(0, s, d) for s, d in zip(signs, marked.base.delta)]
    if all(r.is_rational for r in roots):
        value = _prod([r.rational for r in roots])
        return 1 if value == marked.rho else -1
    with mp.workprec(64):
        value = mp.mpf(1)
        for s, d in zip(signs, marked.base.delta):
            value *= s * mp.sqrt(mp.mpf(d.numerator) / d.denominator)
        rho = mp.mpf(marked.rho.numerator) / marked.rho.denominator
        # the product is exactly +rho or -rho
        if abs(value - rho) < abs(rho) / 2:
            return 1
        if abs(value + rho) < abs(rho) / 2:
            return -1
    raise IdentityCheckError("product of square roots is not +-rho")


def w_subgroup(marked: MarkedTriple, signs: Sequence[int], check_flips: bool = True) -> WSubgroup:
    """
    The subgroup W of E1[2] x E2[2] x E3[2] for roots rho_i = s_i sqrt(delta_i).

    The roots must multiply to rho. P_i and R_i have x = 2 b_i +- 2 rho_i.
    """
    if len(signs) != 3 or any(s not in (1, -1) for s in signs):
        raise ValueError(f"signs must be three of +1/-1, got {signs!r}")
    if _root_product_sign(marked, signs) != 1:
        raise RootProductError(f"roots with signs {tuple(signs)} multiply to -rho")

    points: list[dict[str, TwoTorsionPoint]] = []
    for i in range(3):
        b, c, d = marked.base.b[i], marked.base.c[i], marked.base.delta[i]
        p = QuadraticNumber(2 * b, 2 * signs[i], d)
        r = QuadraticNumber(2 * b, -2 * signs[i], d)
        for x in (p, r):
            if not _on_curve(x, b, c):
                raise IdentityCheckError(f"x = {x} is not a root of E_{i + 1}")
        points.append({
            "O": TwoTorsionPoint("O", None),
            "Q": TwoTorsionPoint("Q", QuadraticNumber(0)),
            "P": TwoTorsionPoint("P", p),
            "R": TwoTorsionPoint("R", r),
        })
    group = WSubgroup(elements=tuple(
        tuple(points[i][label] for i, label in enumerate(pattern)) for pattern in W_PATTERN
    ))

    if check_flips:
        for flip in ((0, 1), (0, 2), (1, 2)):
            flipped = [(-s if k in flip else s) for k, s in enumerate(signs)]
            if w_subgroup(marked, flipped, check_flips=False).coordinate_set() != group.coordinate_set():
                raise IdentityCheckError(f"flipping the signs at {flip} changed W")
    return group


# ---------------------------------------------------------------------------
# Other normalization of the obstruction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HlpTriple:
    """Curves y^2 = x(x^2 + A_i x + B_i) with A_i = -4 b_i, B_i = -4 c_i."""
    coefficients: tuple[tuple[Fraction, Fraction], ...]
    discriminants: Triple          # A_i^2 - 4 B_i = 16 delta_i
    d_product: Fraction            # d1 d2 d3 with d_i = -4 rho_i


def hlp_coefficients(marked: MarkedTriple) -> HlpTriple:
    coeffs = tuple((-4 * b, -4 * c) for b, c in zip(marked.base.b, marked.base.c))
    discs = tuple(a * a - 4 * bb for a, bb in coeffs)
    if discs != tuple(16 * d for d in marked.base.delta):
        raise IdentityCheckError("A_i^2 - 4 B_i differs from 16 delta_i")
    return HlpTriple(coefficients=coeffs, discriminants=discs, d_product=-64 * marked.rho)


def hlp_t0(coefficients: Sequence[tuple[Rational, Rational]], d_product: Rational) -> Fraction:
    """T0 = d1 d2 d3 (sum A_i^2 / Delta_i - 1) - 2 A1 A2 A3, Delta_i = A_i^2 - 4 B_i."""
    a_values = [Fraction(a) for a, _ in coefficients]
    discs = [Fraction(a) ** 2 - 4 * Fraction(b) for a, b in coefficients]
    if any(d == 0 for d in discs):
        raise InvalidMarkedTripleError("a curve in the triple has zero discriminant")
    return Fraction(d_product) * (sum(a * a / d for a, d in zip(a_values, discs)) - 1) - 2 * _prod(a_values)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------

def random_ciani_matrix(
    rng: random.Random,
    bound: int = 5,
    invertible: bool = True,
    same_sign_c: bool = False,
    max_tries: int = 10_000,
) -> CianiMatrix:
    """
    Seeded random element of S (of S^x when `invertible`). Entries are
    integers or halves in [-bound, bound].

    `same_sign_c` asks for c1, c2, c3 of one sign, so that the curves of
    Cof m have real two-torsion.
    """
    def entry(nonzero: bool) -> Fraction:
        while True:
            den = rng.choice((1, 1, 2))
            value = Fraction(rng.randint(-bound * den, bound * den), den)
            if value or not nonzero:
                return value

    for _ in range(max_tries):
        m = CianiMatrix(a=tuple(entry(True) for _ in range(3)), b=tuple(entry(False) for _ in range(3)))
        if not m.in_s or (invertible and m.det == 0):
            continue
        if same_sign_c and not (all(c > 0 for c in m.c) or all(c < 0 for c in m.c)):
            continue
        return m
    raise RuntimeError(f"no admissible Ciani matrix after {max_tries} draws")
