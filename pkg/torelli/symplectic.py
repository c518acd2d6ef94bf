"""
Integer symplectic matrices, their level-2 subgroups, theta characteristics and
maximal isotropic subspaces of F_2^(2g).

Matrices are tuples of integer rows. M = [[A, B], [C, D]] with g x g blocks.
A vector of F_2^(2g) lists the top row eps1 of a characteristic first, then
eps2.
"""
import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Iterable, Literal, Sequence

from torelli.errors import (
    GenusOutOfRangeError,
    IdentityCheckError,
    MatrixShapeError,
    NotIsotropicError,
    NotMaximalIsotropicError,
    NotSymplecticError,
    SubgroupMembershipError,
)
from torelli.resultant import bareiss_determinant

IntMatrix = tuple[tuple[int, ...], ...]
F2Vector = tuple[int, ...]
LiftStrategy = Literal["first", "last"]

MAX_ENUMERATION_GENUS: int = 3


# ---------------------------------------------------------------------------
# Integer matrix helpers
# ---------------------------------------------------------------------------

def as_int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    out = []
    for row in rows:
        converted = []
        for v in row:
            if int(v) != v:
                raise MatrixShapeError(f"entry {v!r} is not an integer")
            converted.append(int(v))
        out.append(tuple(converted))
    return tuple(out)


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(n: int) -> IntMatrix:
    return tuple((0,) * n for _ in range(n))


def transpose(m: IntMatrix) -> IntMatrix:
    return tuple(zip(*m)) if m else ()


def matmul(x: IntMatrix, y: IntMatrix) -> IntMatrix:
    cols = transpose(y)
    return tuple(tuple(sum(a * b for a, b in zip(row, col)) for col in cols) for row in x)


def matvec(m: IntMatrix, v: Sequence[int]) -> tuple[int, ...]:
    return tuple(sum(a * b for a, b in zip(row, v)) for row in m)


def scale(m: IntMatrix, k: int) -> IntMatrix:
    return tuple(tuple(k * v for v in row) for row in m)


def mat_add(x: IntMatrix, y: IntMatrix) -> IntMatrix:
    return tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(x, y))


def mod2(m: IntMatrix) -> IntMatrix:
    return tuple(tuple(v % 2 for v in row) for row in m)


def is_symmetric(m: IntMatrix) -> bool:
    return m == transpose(m)


def diagonal(m: IntMatrix) -> tuple[int, ...]:
    """(X)_0: the diagonal of a square matrix as a vector."""
    return tuple(m[i][i] for i in range(len(m)))


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def block(a: IntMatrix, b: IntMatrix, c: IntMatrix, d: IntMatrix) -> IntMatrix:
    top = tuple(ra + rb for ra, rb in zip(a, b))
    bottom = tuple(rc + rd for rc, rd in zip(c, d))
    return top + bottom


def split_blocks(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    g = len(m) // 2
    a = tuple(row[:g] for row in m[:g])
    b = tuple(row[g:] for row in m[:g])
    c = tuple(row[:g] for row in m[g:])
    d = tuple(row[g:] for row in m[g:])
    return a, b, c, d


def int_determinant(m: IntMatrix) -> int:
    return int(bareiss_determinant(m))


def inverse_unimodular(m: IntMatrix) -> IntMatrix:
    """Exact inverse of an integer matrix with determinant +-1 (Gauss-Jordan over Q)."""
    n = len(m)
    det = int_determinant(m)
    if det not in (1, -1):
        raise MatrixShapeError(f"matrix is not unimodular (det = {det})")
    work = [[Fraction(v) for v in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if work[r][col] != 0)
        work[col], work[pivot] = work[pivot], work[col]
        lead = work[col][col]
        work[col] = [v / lead for v in work[col]]
        for r in range(n):
            if r != col and work[r][col] != 0:
                factor = work[r][col]
                work[r] = [v - factor * w for v, w in zip(work[r], work[col])]
    out = tuple(tuple(int(v) for v in row[n:]) for row in work)
    if any(v.denominator != 1 for row in work for v in row[n:]):
        raise IdentityCheckError("inverse of a unimodular matrix is not integral")
    return out


def standard_j(g: int) -> IntMatrix:
    return block(zeros(g), identity(g), scale(identity(g), -1), zeros(g))


# ---------------------------------------------------------------------------
# Symplectic matrices
# ---------------------------------------------------------------------------

def _check_shape(m: IntMatrix) -> int:
    n = len(m)
    if n == 0 or any(len(row) != n for row in m):
        raise MatrixShapeError(f"matrix must be square, got {n} rows of lengths {sorted({len(r) for r in m})}")
    if n % 2:
        raise MatrixShapeError(f"matrix dimension must be even, got {n}")
    return n // 2


def is_symplectic(rows: Sequence[Sequence[int]]) -> bool:
    """
    M J tM = J, cross-checked against both block characterizations:
    (tA C, tB D symmetric, tA D - tC B = 1) and (A tB, C tD symmetric, A tD - B tC = 1).
    """
    m = as_int_matrix(rows)
    g = _check_shape(m)
    a, b, c, d = split_blocks(m)
    one = identity(g)
    at, bt, ct, dt = transpose(a), transpose(b), transpose(c), transpose(d)

    by_form = matmul(matmul(m, standard_j(g)), transpose(m)) == standard_j(g)
    by_columns = (
        is_symmetric(matmul(at, c))
        and is_symmetric(matmul(bt, d))
        and mat_add(matmul(at, d), scale(matmul(ct, b), -1)) == one
    )
    by_rows = (
        is_symmetric(matmul(a, bt))
        and is_symmetric(matmul(c, dt))
        and mat_add(matmul(a, dt), scale(matmul(b, ct), -1)) == one
    )
    if not (by_form == by_columns == by_rows):
        raise IdentityCheckError(
            f"symplectic characterizations disagree: form={by_form}, "
            f"columns={by_columns}, rows={by_rows}"
        )
    return by_form


@dataclass(frozen=True)
class SymplecticMatrix:
    entries: IntMatrix

    def __post_init__(self) -> None:
        entries = as_int_matrix(self.entries)
        object.__setattr__(self, "entries", entries)
        if not is_symplectic(entries):
            raise NotSymplecticError("M J tM != J")

    @property
    def g(self) -> int:
        return len(self.entries) // 2

    @property
    def blocks(self) -> tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
        return split_blocks(self.entries)

    @property
    def a(self) -> IntMatrix:
        return self.blocks[0]

    @property
    def b(self) -> IntMatrix:
        return self.blocks[1]

    @property
    def c(self) -> IntMatrix:
        return self.blocks[2]

    @property
    def d(self) -> IntMatrix:
        return self.blocks[3]

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(matmul(self.entries, other.entries))

    def transpose(self) -> "SymplecticMatrix":
        return SymplecticMatrix(transpose(self.entries))

    def inverse(self) -> "SymplecticMatrix":
        return symplectic_inverse(self)

    @classmethod
    def identity(cls, g: int) -> "SymplecticMatrix":
        return cls(identity(2 * g))

    @classmethod
    def j(cls, g: int) -> "SymplecticMatrix":
        return cls(standard_j(g))


def symplectic_inverse(m: SymplecticMatrix) -> SymplecticMatrix:
    """[[A, B], [C, D]]^-1 = [[tD, -tB], [-tC, tA]]."""
    a, b, c, d = m.blocks
    inv = SymplecticMatrix(block(transpose(d), scale(transpose(b), -1), scale(transpose(c), -1), transpose(a)))
    if matmul(m.entries, inv.entries) != identity(2 * m.g):
        raise IdentityCheckError("block inverse formula failed")
    return inv


def levi(a: Sequence[Sequence[int]]) -> SymplecticMatrix:
    """M(A) = diag(A, tA^-1) for A in GL_g(Z)."""
    a = as_int_matrix(a)
    g = len(a)
    return SymplecticMatrix(block(a, zeros(g), zeros(g), transpose(inverse_unimodular(a))))


def upper(s: Sequence[Sequence[int]]) -> SymplecticMatrix:
    """U(S) = [[1, S], [0, 1]] for symmetric S."""
    s = as_int_matrix(s)
    g = len(s)
    return SymplecticMatrix(block(identity(g), s, zeros(g), identity(g)))


def lower(s: Sequence[Sequence[int]]) -> SymplecticMatrix:
    """V(S) = [[1, 0], [S, 1]] for symmetric S."""
    s = as_int_matrix(s)
    g = len(s)
    return SymplecticMatrix(block(identity(g), zeros(g), s, identity(g)))


# ---------------------------------------------------------------------------
# Subgroups
# ---------------------------------------------------------------------------

class Subgroup(str, Enum):
    PRINCIPAL = "Gamma(n)"
    UPPER_LEVEL_TWO = "Gamma^0(2)"
    LOWER_LEVEL_TWO = "Gamma_0(2)"
    THETA = "Gamma(1,2)"
    LEVI = "M(Z)"
    UPPER_UNIPOTENT = "U(Z)"
    LOWER_UNIPOTENT = "V(Z)"
    PARABOLIC = "P(Z)"


def _is_zero(m: IntMatrix, modulus: int | None = None) -> bool:
    if modulus is None:
        return all(v == 0 for row in m for v in row)
    return all(v % modulus == 0 for row in m for v in row)


def subgroup_membership(m: SymplecticMatrix, which: Subgroup, level: int = 2) -> bool:
    a, b, c, d = m.blocks
    g = m.g
    one = identity(g)
    match which:
        case Subgroup.PRINCIPAL:
            if level < 1:
                raise ValueError(f"level must be positive, got {level}")
            return _is_zero(mat_add(m.entries, scale(identity(2 * g), -1)), level)
        case Subgroup.UPPER_LEVEL_TWO:
            return _is_zero(b, 2)
        case Subgroup.LOWER_LEVEL_TWO:
            return _is_zero(c, 2)
        case Subgroup.THETA:
            return all(v % 2 == 0 for v in diagonal(matmul(a, transpose(b)))) and all(
                v % 2 == 0 for v in diagonal(matmul(c, transpose(d)))
            )
        case Subgroup.LEVI:
            return _is_zero(b) and _is_zero(c)
        case Subgroup.UPPER_UNIPOTENT:
            return a == one and d == one and _is_zero(c)
        case Subgroup.LOWER_UNIPOTENT:
            return a == one and d == one and _is_zero(b)
        case Subgroup.PARABOLIC:
            return _is_zero(c)
    raise ValueError(f"unknown subgroup {which!r}")


def membership_report(m: SymplecticMatrix) -> dict[str, bool]:
    """Membership in every tracked subgroup, Gamma(n) taken at level 2."""
    report = {which.value: subgroup_membership(m, which) for which in Subgroup}
    report["Gamma(2)"] = report.pop(Subgroup.PRINCIPAL.value)
    return report


# ---------------------------------------------------------------------------
# Theta characteristics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ThetaCharacteristic:
    eps1: tuple[int, ...]
    eps2: tuple[int, ...]

    def __post_init__(self) -> None:
        eps1 = tuple(int(v) for v in self.eps1)
        eps2 = tuple(int(v) for v in self.eps2)
        if len(eps1) != len(eps2) or not eps1:
            raise MatrixShapeError(f"characteristic rows must have equal positive length, got {len(eps1)} and {len(eps2)}")
        object.__setattr__(self, "eps1", eps1)
        object.__setattr__(self, "eps2", eps2)

    @classmethod
    def parse(cls, text: str) -> "ThetaCharacteristic":
        """Accepts "101,010", "[101;010]" or "1 0 1; 0 1 0" (digits 0/1 in the compact forms)."""
        body = text.strip().strip("[]")
        for sep in (";", ","):
            if sep in body:
                top, bottom = body.split(sep, 1)
                break
        else:
            raise ValueError(f"characteristic {text!r} needs ',' or ';' between its rows")

        def row(part: str) -> tuple[int, ...]:
            part = part.strip()
            tokens = part.split() if " " in part else list(part)
            return tuple(int(t) for t in tokens)

        try:
            return cls(row(top), row(bottom))
        except ValueError as exc:
            raise ValueError(f"characteristic {text!r} is malformed: {exc}") from exc

    @property
    def g(self) -> int:
        return len(self.eps1)

    @property
    def parity(self) -> int:
        return dot(self.eps1, self.eps2) % 2

    @property
    def is_even(self) -> bool:
        return self.parity == 0

    def reduced(self) -> "ThetaCharacteristic":
        return ThetaCharacteristic(tuple(v % 2 for v in self.eps1), tuple(v % 2 for v in self.eps2))

    def as_vector(self) -> F2Vector:
        return tuple(v % 2 for v in self.eps1 + self.eps2)

    @classmethod
    def from_vector(cls, v: Sequence[int]) -> "ThetaCharacteristic":
        g = len(v) // 2
        return cls(tuple(v[:g]), tuple(v[g:]))

    def __str__(self) -> str:
        if all(v in (0, 1) for v in self.eps1 + self.eps2):
            return f"[{''.join(map(str, self.eps1))};{''.join(map(str, self.eps2))}]"
        return f"[{' '.join(map(str, self.eps1))};{' '.join(map(str, self.eps2))}]"


def char_action(m: SymplecticMatrix, eps: ThetaCharacteristic) -> ThetaCharacteristic:
    """
    M.eps = [D eps1 - C eps2 + (C tD)_0 ; -B eps1 + A eps2 + (A tB)_0], as integers.
    """
    if eps.g != m.g:
        raise MatrixShapeError(f"characteristic of genus {eps.g} with a matrix of genus {m.g}")
    a, b, c, d = m.blocks
    cd0 = diagonal(matmul(c, transpose(d)))
    ab0 = diagonal(matmul(a, transpose(b)))
    top = tuple(x - y + z for x, y, z in zip(matvec(d, eps.eps1), matvec(c, eps.eps2), cd0))
    bottom = tuple(-x + y + z for x, y, z in zip(matvec(b, eps.eps1), matvec(a, eps.eps2), ab0))
    return ThetaCharacteristic(top, bottom)


def phi(eps: ThetaCharacteristic, m: SymplecticMatrix) -> int:
    """
    phi_eps(M) = eps1 tD B eps1 - 2 eps1 tB C eps2 + eps2 tC A eps2
                 - 2 (D eps1 - C eps2) . (A tB)_0
    """
    if eps.g != m.g:
        raise MatrixShapeError(f"characteristic of genus {eps.g} with a matrix of genus {m.g}")
    a, b, c, d = m.blocks
    e1, e2 = eps.eps1, eps.eps2
    ab0 = diagonal(matmul(a, transpose(b)))
    shifted = tuple(x - y for x, y in zip(matvec(d, e1), matvec(c, e2)))
    return (
        dot(e1, matvec(matmul(transpose(d), b), e1))
        - 2 * dot(e1, matvec(matmul(transpose(b), c), e2))
        + dot(e2, matvec(matmul(transpose(c), a), e2))
        - 2 * dot(shifted, ab0)
    )


# ---------------------------------------------------------------------------
# F_2 linear algebra
# ---------------------------------------------------------------------------

def symplectic_pairing(u: Sequence[int], v: Sequence[int]) -> int:
    g = len(u) // 2
    return (dot(u[:g], v[g:]) + dot(u[g:], v[:g])) % 2


def rref_f2(rows: Iterable[Sequence[int]], width: int) -> tuple[F2Vector, ...]:
    """Reduced row echelon form over F_2, zero rows dropped."""
    work = [[v % 2 for v in r] for r in rows]
    pivot_row = 0
    for col in range(width):
        sel = next((i for i in range(pivot_row, len(work)) if work[i][col]), None)
        if sel is None:
            continue
        work[pivot_row], work[sel] = work[sel], work[pivot_row]
        for i in range(len(work)):
            if i != pivot_row and work[i][col]:
                work[i] = [(x + y) % 2 for x, y in zip(work[i], work[pivot_row])]
        pivot_row += 1
    return tuple(tuple(r) for r in work[:pivot_row])


def _inverse_f2(m: IntMatrix) -> IntMatrix | None:
    n = len(m)
    work = [[v % 2 for v in row] + [int(i == j) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        sel = next((r for r in range(col, n) if work[r][col]), None)
        if sel is None:
            return None
        work[col], work[sel] = work[sel], work[col]
        for r in range(n):
            if r != col and work[r][col]:
                work[r] = [(x + y) % 2 for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


@dataclass(frozen=True)
class IsotropicSubspace:
    g: int
    basis: tuple[F2Vector, ...]

    def __post_init__(self) -> None:
        canonical = rref_f2(self.basis, 2 * self.g)
        for u in canonical:
            if len(u) != 2 * self.g:
                raise MatrixShapeError(f"vectors must have length {2 * self.g}")
        for i, u in enumerate(canonical):
            for v in canonical[i:]:
                if symplectic_pairing(u, v):
                    raise NotIsotropicError(f"<{u}, {v}> = 1")
        object.__setattr__(self, "basis", canonical)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def is_maximal(self) -> bool:
        return self.dimension == self.g

    def elements(self) -> list[F2Vector]:
        out = []
        for coeffs in product((0, 1), repeat=self.dimension):
            vec = [0] * (2 * self.g)
            for k, row in zip(coeffs, self.basis):
                if k:
                    vec = [(x + y) % 2 for x, y in zip(vec, row)]
            out.append(tuple(vec))
        return sorted(out)

    def contains(self, v: Sequence[int]) -> bool:
        return len(rref_f2(self.basis + (tuple(v),), 2 * self.g)) == self.dimension

    @classmethod
    def standard(cls, g: int) -> "IsotropicSubspace":
        """V0, spanned by the characteristics [e_i; 0]."""
        return cls(g, tuple(tuple(int(j == i) for j in range(2 * g)) for i in range(g)))


def _check_genus(g: int) -> None:
    if not 1 <= g <= MAX_ENUMERATION_GENUS:
        raise GenusOutOfRangeError(f"genus must be between 1 and {MAX_ENUMERATION_GENUS}, got {g}")


def enumerate_max_isotropic(g: int) -> list[IsotropicSubspace]:
    """All maximal isotropic subspaces of F_2^(2g), sorted by canonical basis."""
    _check_genus(g)
    width = 2 * g
    vectors = [v for v in product((0, 1), repeat=width) if any(v)]
    found: set[tuple[F2Vector, ...]] = set()

    def extend(chosen: list[F2Vector], start: int) -> None:
        if len(chosen) == g:
            found.add(rref_f2(chosen, width))
            return
        for idx in range(start, len(vectors)):
            v = vectors[idx]
            if any(symplectic_pairing(v, u) for u in chosen):
                continue
            if len(rref_f2(chosen + [v], width)) <= len(chosen):
                continue
            extend(chosen + [v], idx + 1)

    extend([], 0)
    return [IsotropicSubspace(g, basis) for basis in sorted(found)]


def count_transporter_cosets(g: int) -> int:
    """|Sp(2g, F_2)| / |P(F_2)|, equal to prod_{i=1..g} (2^i + 1)."""
    sp_order = 2 ** (g * g)
    for i in range(1, g + 1):
        sp_order *= 2 ** (2 * i) - 1
    gl_order = 1
    for i in range(g):
        gl_order *= 2**g - 2**i
    parabolic_order = gl_order * 2 ** (g * (g + 1) // 2)
    count, remainder = divmod(sp_order, parabolic_order)
    expected = 1
    for i in range(1, g + 1):
        expected *= 2**i + 1
    if remainder or count != expected:
        raise IdentityCheckError(f"coset count {sp_order}/{parabolic_order} is not {expected}")
    return count


def _symmetric_01(g: int) -> list[IntMatrix]:
    slots = [(i, j) for i in range(g) for j in range(i, g)]
    out = []
    for bits in product((0, 1), repeat=len(slots)):
        m = [[0] * g for _ in range(g)]
        for (i, j), bit in zip(slots, bits):
            m[i][j] = m[j][i] = bit
        out.append(as_int_matrix(m))
    return out


def image_of_standard(m: SymplecticMatrix) -> IsotropicSubspace:
    """M.V0 mod 2, spanned by the first g columns of M."""
    columns = transpose(m.entries)[: m.g]
    return IsotropicSubspace(m.g, tuple(tuple(v % 2 for v in col) for col in columns))


def transporter_lift(v: IsotropicSubspace, strategy: LiftStrategy = "first") -> SymplecticMatrix:
    """
    Integer symplectic M with M.V0 = V mod 2, as M = U(-S1) V(-S2).

    S1 is the first (or last) symmetric 0/1 matrix making X + S1 Y invertible
    mod 2, where the columns [X; Y] span V; then S2 = Y (X + S1 Y)^-1 mod 2.
    Lifts obtained with different strategies differ by an element of Gamma_0(2).
    """
    if not v.is_maximal:
        raise NotMaximalIsotropicError(f"subspace has dimension {v.dimension}, expected {v.g}")
    g = v.g
    cols = v.basis
    x = tuple(tuple(cols[j][i] for j in range(g)) for i in range(g))
    y = tuple(tuple(cols[j][g + i] for j in range(g)) for i in range(g))

    candidates = _symmetric_01(g)
    if strategy == "last":
        candidates = candidates[::-1]
    for s1 in candidates:
        shifted = mod2(mat_add(x, matmul(s1, y)))
        inverse = _inverse_f2(shifted)
        if inverse is None:
            continue
        s2 = mod2(matmul(y, inverse))
        if not is_symmetric(s2):
            raise IdentityCheckError("Y (X + S1 Y)^-1 is not symmetric for an isotropic subspace")
        lift = upper(scale(s1, -1)) @ lower(scale(s2, -1))
        if image_of_standard(lift) != v:
            raise IdentityCheckError("lift does not carry V0 to V")
        return lift
    raise IdentityCheckError("no symmetric S1 makes X + S1 Y invertible")


# ---------------------------------------------------------------------------
# Gamma^0(2) decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Gamma0Decomposition:
    """M = gamma . lower . levi with gamma in Gamma(2), lower in V(Z), levi in M(Z)."""
    gamma: SymplecticMatrix
    levi: SymplecticMatrix
    lower: SymplecticMatrix


def _lift_gl2(a_bar: IntMatrix) -> IntMatrix:
    """An element of GL_g(Z) congruent to a_bar, an invertible matrix over F_2."""
    g = len(a_bar)
    work = [list(row) for row in mod2(a_bar)]
    lifted = identity(g)
    for col in range(g):
        sel = next((r for r in range(col, g) if work[r][col]), None)
        if sel is None:
            raise SubgroupMembershipError("A is singular mod 2")
        if sel != col:
            work[col], work[sel] = work[sel], work[col]
            swap = [list(row) for row in identity(g)]
            swap[col], swap[sel] = swap[sel], swap[col]
            lifted = matmul(lifted, as_int_matrix(swap))
        for r in range(g):
            if r != col and work[r][col]:
                work[r] = [(p + q) % 2 for p, q in zip(work[r], work[col])]
                elementary = [list(row) for row in identity(g)]
                elementary[r][col] = 1
                lifted = matmul(lifted, as_int_matrix(elementary))
    if mod2(lifted) != mod2(a_bar):
        raise IdentityCheckError("GL_g(Z) lift does not reduce to A mod 2")
    return lifted


def decompose_gamma0(m: SymplecticMatrix) -> Gamma0Decomposition:
    if not subgroup_membership(m, Subgroup.UPPER_LEVEL_TWO):
        raise SubgroupMembershipError("B is not even: matrix is outside Gamma^0(2)")
    a = m.a
    a0 = a if abs(int_determinant(a)) == 1 else _lift_gl2(a)
    p = levi(a0)
    reduced = m @ p.inverse()

    c_prime = reduced.c
    if is_symmetric(c_prime):
        s = c_prime
    else:
        s = mod2(c_prime)
        if not is_symmetric(s):
            raise IdentityCheckError("C A0^-1 is not symmetric mod 2")
    vc = lower(s)
    gamma = reduced @ lower(scale(s, -1))

    if not subgroup_membership(gamma, Subgroup.PRINCIPAL, level=2):
        raise IdentityCheckError("decomposition residue is not in Gamma(2)")
    if (gamma @ vc @ p).entries != m.entries:
        raise IdentityCheckError("gamma . Vc . P does not reproduce M")
    return Gamma0Decomposition(gamma=gamma, levi=p, lower=vc)


def kappa_squared_parabolic(m: SymplecticMatrix) -> int:
    """kappa(M)^2 = det D on P(Z)."""
    if not subgroup_membership(m, Subgroup.PARABOLIC):
        raise SubgroupMembershipError("C != 0: matrix is outside P(Z)")
    det = int_determinant(m.d)
    if det not in (1, -1):
        raise IdentityCheckError(f"det D = {det} on P(Z)")
    return det


# ---------------------------------------------------------------------------
# The transporter of the two-torsion subgroup of E1 x E2 x E3
# ---------------------------------------------------------------------------

_N_ROWS: IntMatrix = (
    (0, 0, 1, 0, -1, 0),
    (0, 0, 1, 0, 0, 0),
    (0, 0, 1, -1, 0, 0),
    (0, 1, 0, 0, 0, 0),
    (-1, -1, 0, 0, 0, 1),
    (1, 0, 0, 0, 0, 0),
)
_N_LEVI_A: IntMatrix = ((0, -1, 1), (0, 0, 1), (-1, 0, 1))
_N_Q_ROWS: IntMatrix = (
    (0, 0, 0, 1, 0, 0),
    (0, 0, 0, 0, 1, 0),
    (0, 0, 1, 0, 0, 0),
    (-1, 0, 0, 0, 0, 0),
    (0, -1, 0, 0, 0, 0),
    (0, 0, 0, 0, 0, 1),
)
# basis of the level-2 subspace attached to W: [000;011], [000;110], [111;000]
W_BASIS: tuple[ThetaCharacteristic, ...] = (
    ThetaCharacteristic((0, 0, 0), (0, 1, 1)),
    ThetaCharacteristic((0, 0, 0), (1, 1, 0)),
    ThetaCharacteristic((1, 1, 1), (0, 0, 0)),
)


def w_subspace() -> IsotropicSubspace:
    return IsotropicSubspace(3, tuple(c.as_vector() for c in W_BASIS))


def w_transporter() -> SymplecticMatrix:
    """N in Trans(W): symplectic, in Gamma(1,2), with N e_i = alpha_i mod 2."""
    n = SymplecticMatrix(_N_ROWS)
    if not subgroup_membership(n, Subgroup.THETA):
        raise IdentityCheckError("N is not in Gamma(1,2)")
    columns = transpose(n.entries)
    for i, alpha in enumerate(W_BASIS):
        if tuple(v % 2 for v in columns[i]) != alpha.as_vector():
            raise IdentityCheckError(f"N e_{i + 1} is not alpha_{i + 1} mod 2")
    return n


@dataclass(frozen=True)
class TransporterFactorization:
    n: SymplecticMatrix
    levi: SymplecticMatrix
    q: SymplecticMatrix
    s: IntMatrix            # Q^2 = diag(S, S)
    kappa_squared_levi: int
    kappa_fourth_q: int


def transporter_factorization() -> TransporterFactorization:
    n = w_transporter()
    l_factor = levi(_N_LEVI_A)
    q = SymplecticMatrix(_N_Q_ROWS)
    if (l_factor @ q).entries != n.entries:
        raise IdentityCheckError("N != L Q")
    q2 = q @ q
    s = q2.a
    if not (subgroup_membership(q2, Subgroup.LEVI) and q2.d == s):
        raise IdentityCheckError("Q^2 is not diag(S, S)")
    for factor in (l_factor, l_factor.transpose(), q, q.transpose(), n.transpose()):
        if not subgroup_membership(factor, Subgroup.THETA):
            raise IdentityCheckError("a factor of N lies outside Gamma(1,2)")
    return TransporterFactorization(
        n=n,
        levi=l_factor,
        q=q,
        s=s,
        kappa_squared_levi=kappa_squared_parabolic(l_factor),
        kappa_fourth_q=kappa_squared_parabolic(q2),
    )


# ---------------------------------------------------------------------------
# Seeded random words
# ---------------------------------------------------------------------------

def random_unimodular(rng: random.Random, g: int, steps: int = 3) -> IntMatrix:
    a = identity(g)
    for _ in range(steps):
        e = [list(row) for row in identity(g)]
        if g > 1 and rng.random() < 0.7:
            i, j = rng.sample(range(g), 2)
            e[i][j] = rng.choice((-1, 1))
        elif g > 1:
            i, j = rng.sample(range(g), 2)
            e[i], e[j] = e[j], e[i]
        else:
            e[0][0] = rng.choice((-1, 1))
        a = matmul(a, as_int_matrix(e))
    return a


def random_symmetric(rng: random.Random, g: int, bound: int = 1) -> IntMatrix:
    m = [[0] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            m[i][j] = m[j][i] = rng.randint(-bound, bound)
    return as_int_matrix(m)


def _random_word(rng: random.Random, g: int, length: int, upper_factor: int) -> SymplecticMatrix:
    word = SymplecticMatrix.identity(g)
    for _ in range(length):
        kind = rng.choice(("M", "U", "V"))
        if kind == "M":
            word = word @ levi(random_unimodular(rng, g))
        elif kind == "U":
            word = word @ upper(scale(random_symmetric(rng, g), upper_factor))
        else:
            word = word @ lower(random_symmetric(rng, g))
    return word


def random_symplectic(rng: random.Random, g: int, length: int = 6) -> SymplecticMatrix:
    """Word in M(1), U(1), V(1)."""
    return _random_word(rng, g, length, upper_factor=1)


def random_gamma0_2(rng: random.Random, g: int, length: int = 6) -> SymplecticMatrix:
    """Word in M(1), U(2), V(1); lies in Gamma^0(2)."""
    word = _random_word(rng, g, length, upper_factor=2)
    if not subgroup_membership(word, Subgroup.UPPER_LEVEL_TWO):
        raise IdentityCheckError("generator word left Gamma^0(2)")
    return word
