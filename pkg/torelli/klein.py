"""
Numerical verification of the discriminant identity for Ciani quartics.

Starting from three elliptic lattices (tau_i, omega2_i), the uniformized
Ciani matrix m(Omega) is built from genus-1 theta constants. The quotient of
E1 x E2 x E3 by the two-torsion subgroup W has period matrix
Omega' = Omega N H (N a transporter of W, H = diag(1/2, 1)), and

    (pi/2)^54 det(Omega2')^-18 chi18(tau(Omega')) = X(m(Omega)).

The path back from rational curves to lattices goes through AGM periods,
which closes the loop for a rational Ciani matrix m.
"""
import sys
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from mpmath import mp

from torelli.ciani import (
    CianiMatrix,
    W_PATTERN,
    ab_of,
    ciani_form,
    closed_discriminant,
    cofactor_matrix,
    x_invariant,
)
from torelli.errors import (
    DegenerateLatticeError,
    IdentityCheckError,
    InvalidMarkedTripleError,
    NotInCianiDomainError,
    PeriodComputationError,
    RootNotFoundError,
    UnsupportedConfigurationError,
)
from torelli.resultant import discriminant_quartic
from torelli.symplectic import (
    W_BASIS,
    IsotropicSubspace,
    SymplecticMatrix,
    ThetaCharacteristic,
    image_of_standard,
    w_subspace,
    w_transporter,
)
from torelli.theta import (
    GUARD_BITS,
    PeriodMatrix,
    RiemannMatrix,
    act,
    chi_period,
    det_omega2,
    period_act,
    tau_of_omega,
    theta_nulls,
)

_CYCLIC = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
_THETA_00 = ThetaCharacteristic((0,), (0,))
_THETA_10 = ThetaCharacteristic((1,), (0,))
_THETA_01 = ThetaCharacteristic((0,), (1,))


def _tolerance(p: int) -> Any:
    return mp.mpf(2) ** (-(p // 2))


def _mpf(q: Fraction | int) -> Any:
    q = Fraction(q)
    return mp.mpf(q.numerator) / q.denominator


def _relative(lhs: Any, rhs: Any) -> Any:
    size = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / size if size else mp.mpf(0)


def _prod(values: Sequence[Any]) -> Any:
    out = mp.mpc(1)
    for v in values:
        out *= v
    return out


# ---------------------------------------------------------------------------
# Uniformized Ciani matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniformizedTriple:
    """m(Omega) and its theta data for Omega = diag(omega2_i tau_i) | diag(omega2_i)."""
    taus: tuple[Any, Any, Any]
    omega2: tuple[Any, Any, Any]
    theta0: tuple[Any, Any, Any]     # theta[0;0](tau_i)
    theta1: tuple[Any, Any, Any]     # theta[1;0](tau_i)
    theta2: tuple[Any, Any, Any]     # theta[0;1](tau_i)
    a: tuple[Any, Any, Any]
    b: tuple[Any, Any, Any]
    c: tuple[Any, Any, Any]
    rho: Any
    rho_theta: Any
    precision: int

    def rows(self) -> list[list[Any]]:
        a1, a2, a3 = self.a
        b1, b2, b3 = self.b
        return [[a1, b3, b2], [b3, a2, b1], [b2, b1, a3]]

    def det_m(self) -> Any:
        with mp.workprec(self.precision + GUARD_BITS):
            return mp.det(mp.matrix(self.rows()))

    def x_direct(self) -> Any:
        """X(m) = (a1 a2 a3)^4 (c1 c2 c3)^2 det m."""
        with mp.workprec(self.precision + GUARD_BITS):
            return _prod(self.a) ** 4 * _prod(self.c) ** 2 * self.det_m()

    def riemann_matrix(self) -> RiemannMatrix:
        return RiemannMatrix.diagonal(self.taus, self.precision)

    def period_matrix(self) -> PeriodMatrix:
        with mp.workprec(self.precision + GUARD_BITS):
            o1 = tuple(tuple(self.omega2[i] * self.taus[i] if i == j else mp.mpc(0) for j in range(3)) for i in range(3))
            o2 = tuple(tuple(self.omega2[i] if i == j else mp.mpc(0) for j in range(3)) for i in range(3))
        return PeriodMatrix(o1, o2, self.precision)


def coefficients_from_tau(
    taus: Sequence[Any],
    omega2: Sequence[Any] | None = None,
    p: int = 256,
) -> UniformizedTriple:
    if len(taus) != 3:
        raise ValueError(f"expected three tau values, got {len(taus)}")
    with mp.workprec(p + GUARD_BITS):
        taus = tuple(mp.mpc(t) for t in taus)
        omega2 = tuple(mp.mpc(w) for w in (omega2 or (1, 1, 1)))
        thetas = [
            theta_nulls([_THETA_00, _THETA_10, _THETA_01], RiemannMatrix(((t,),), p))
            for t in taus
        ]
        theta0 = tuple(t[0] for t in thetas)
        theta1 = tuple(t[1] for t in thetas)
        theta2 = tuple(t[2] for t in thetas)
        vanish = mp.mpf(2) ** (-(p // 3))
        for i in range(3):
            if abs(theta1[i]) < vanish * abs(theta0[i]):
                raise DegenerateLatticeError(f"theta[1;0](tau_{i + 1}) vanishes at working precision")

        pi = mp.pi
        a = [mp.mpc(0)] * 3
        b = [mp.mpc(0)] * 3
        c = [mp.mpc(0)] * 3
        for i, j, k in _CYCLIC:
            a[i] = (
                -pi**2 / 4
                * omega2[i] ** 2 / (omega2[j] * omega2[k]) ** 2
                * theta1[j] ** 4 * theta1[k] ** 4 / theta1[i] ** 4
            )
            b[i] = -pi**2 / (4 * omega2[i] ** 2) * (theta0[i] ** 4 + theta2[i] ** 4)
            c[i] = -pi**4 / (4 * omega2[i] ** 4) * theta0[i] ** 4 * theta2[i] ** 4
        rho = a[0] * a[1] * a[2]
        rho_theta = pi**6 / (64 * _prod(omega2) ** 2) * _prod([t**4 for t in theta1])

        tolerance = _tolerance(p)
        for i, j, k in _CYCLIC:
            if _relative(b[i] ** 2 + c[i], a[j] * a[k]) > tolerance:
                raise IdentityCheckError(f"delta_{i + 1} = b^2 + c differs from a_j a_k")
        if _relative(rho_theta, -rho) > tolerance:
            raise IdentityCheckError("theta expression for rho differs from -a1 a2 a3")

    return UniformizedTriple(
        taus=taus,
        omega2=omega2,
        theta0=theta0,
        theta1=theta1,
        theta2=theta2,
        a=tuple(a),
        b=tuple(b),
        c=tuple(c),
        rho=rho,
        rho_theta=rho_theta,
        precision=p,
    )


def _abcd(u: UniformizedTriple) -> tuple[Any, Any, Any, Any]:
    t0, t2 = u.theta0, u.theta2
    return (
        t0[0] ** 2 * t0[1] ** 2 * t2[2] ** 2,
        t0[0] ** 2 * t2[1] ** 2 * t0[2] ** 2,
        t2[0] ** 2 * t0[1] ** 2 * t0[2] ** 2,
        t2[0] ** 2 * t2[1] ** 2 * t2[2] ** 2,
    )


def r1_product(u: UniformizedTriple) -> Any:
    with mp.workprec(u.precision + GUARD_BITS):
        sa, sb, sc, sd = _abcd(u)
        return (sa + sb + sc + sd) * (sa + sb - sc - sd) * (sa - sb - sc + sd) * (sa - sb + sc - sd)


def det_m_closed(u: UniformizedTriple) -> Any:
    """det m(Omega) = pi^6 / (2^4 prod omega2_i^2 (theta0_i^4 - theta2_i^4)) R1."""
    with mp.workprec(u.precision + GUARD_BITS):
        denominator = 16 * _prod([w**2 * (t0**4 - t2**4) for w, t0, t2 in zip(u.omega2, u.theta0, u.theta2)])
        return mp.pi**6 / denominator * r1_product(u)


def _theta_weight_product(u: UniformizedTriple) -> Any:
    """prod theta0_i^8 theta2_i^8 (theta0_i^4 - theta2_i^4)^3."""
    return _prod([t0**8 * t2**8 * (t0**4 - t2**4) ** 3 for t0, t2 in zip(u.theta0, u.theta2)])


def x_closed(u: UniformizedTriple) -> Any:
    with mp.workprec(u.precision + GUARD_BITS):
        return mp.pi**54 / mp.mpf(2) ** 40 * _prod(u.omega2) ** -18 * _theta_weight_product(u) * r1_product(u)


# ---------------------------------------------------------------------------
# The quotient by W
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WCharacteristics:
    basis: tuple[ThetaCharacteristic, ...]
    elements: tuple[ThetaCharacteristic, ...]
    labels: tuple[tuple[str, str, str], ...]     # O/Q/P/R per factor, same order as elements
    subspace: IsotropicSubspace


_POINT_OF_BITS = {(0, 0): "O", (0, 1): "Q", (1, 0): "P", (1, 1): "R"}


def w_characteristics() -> WCharacteristics:
    """
    The eight characteristics of W. Top row bit i marks omega1_i / 2 (P_i),
    bottom row bit i marks omega2_i / 2 (Q_i).
    """
    subspace = w_subspace()
    elements = tuple(
        sorted(
            (ThetaCharacteristic.from_vector(v) for v in subspace.elements()),
            key=lambda ch: (ch.eps1, ch.eps2),
        )
    )
    labels = tuple(
        tuple(_POINT_OF_BITS[(ch.eps1[i], ch.eps2[i])] for i in range(3)) for ch in elements
    )
    if set(labels) != set(W_PATTERN):
        raise IdentityCheckError("W characteristics do not match the two-torsion pattern of W")
    if IsotropicSubspace(3, tuple(c.as_vector() for c in W_BASIS)) != subspace or not subspace.is_maximal:
        raise IdentityCheckError("alpha basis does not span a maximal isotropic subspace")
    if image_of_standard(w_transporter()) != subspace:
        raise IdentityCheckError("N does not carry V0 onto W")
    return WCharacteristics(basis=W_BASIS, elements=elements, labels=labels, subspace=subspace)


@dataclass(frozen=True)
class OmegaPrime:
    period: PeriodMatrix
    tau: RiemannMatrix
    transporter: SymplecticMatrix
    tau_residual: Any      # tau(Omega') against (1/2) tN.tau


def omega_prime(u: UniformizedTriple, n: SymplecticMatrix | None = None) -> OmegaPrime:
    """Omega' = Omega N H; PeriodMatrix re-checks the Riemann conditions."""
    n = n or w_transporter()
    if image_of_standard(n) != w_subspace():
        raise IdentityCheckError("N is not a transporter of W")
    p = u.precision
    moved = period_act(u.period_matrix(), n)
    with mp.workprec(p + GUARD_BITS):
        half = mp.mpf(1) / 2
        first = tuple(tuple(v * half for v in row) for row in moved.omega1)
    period = PeriodMatrix(first, moved.omega2, p)
    tau = tau_of_omega(period)
    expected = act(n.transpose(), u.riemann_matrix())
    with mp.workprec(p + GUARD_BITS):
        residual = max(
            _relative(tau.tau[i][j], expected.tau[i][j] / 2) for i in range(3) for j in range(3)
        )
    if residual > _tolerance(p):
        raise IdentityCheckError(f"tau(Omega') differs from (1/2) tN.tau by {mp.nstr(residual, 5)}")
    return OmegaPrime(period=period, tau=tau, transporter=n, tau_residual=residual)


# ---------------------------------------------------------------------------
# The eighteen identities
# ---------------------------------------------------------------------------

def _char(top: str, bottom: str) -> ThetaCharacteristic:
    return ThetaCharacteristic(tuple(int(v) for v in top), tuple(int(v) for v in bottom))


# pairs of even characteristics at tau(Omega'); together they cover all 36 once
IDENTITY_PAIRS: tuple[tuple[ThetaCharacteristic, ThetaCharacteristic], ...] = tuple(
    (_char(t, e), _char(t, d))
    for t, e, d in (
        ("000", "000", "001"),
        ("000", "010", "011"),
        ("000", "100", "101"),
        ("000", "110", "111"),
        ("010", "000", "001"),
        ("100", "000", "001"),
        ("110", "000", "001"),
        ("010", "100", "101"),
        ("100", "010", "011"),
        ("110", "110", "111"),
        ("001", "000", "010"),
        ("001", "100", "110"),
        ("011", "000", "100"),
        ("101", "000", "010"),
        ("111", "000", "110"),
        ("011", "011", "111"),
        ("111", "011", "101"),
        ("101", "101", "111"),
    )
)


def identity_right_sides(u: UniformizedTriple) -> list[Any]:
    """Right-hand sides of the eighteen identities without the constant c."""
    p1, p2, p3 = u.theta0
    r1, r2, r3 = u.theta1
    q1, q2, q3 = u.theta2
    sa, sb, sc, sd = _abcd(u)
    return [
        sa + sb + sc + sd,
        sa + sb - sc - sd,
        -(sa - sb - sc + sd),
        -(sa - sb + sc - sd),
        2 * p1 * q1 * p2 * q2 * (p3**2 + q3**2),
        2 * p2 * q2 * p3 * q3 * (p1**2 + q1**2),
        2 * p1 * q1 * p3 * q3 * (p2**2 + q2**2),
        2 * p1 * q1 * p2 * q2 * (p3**2 - q3**2),
        2 * p2 * q2 * p3 * q3 * (p1**2 - q1**2),
        -2 * p1 * q1 * p3 * q3 * (p2**2 - q2**2),
        2 * p1 * r1 * p2 * r2 * p3 * r3,
        2 * p1 * r1 * p2 * r2 * p3 * r3,
        2 * r1 * q1 * r2 * q2 * p3 * r3,
        2 * p1 * r1 * r2 * q2 * r3 * q3,
        2 * r1 * q1 * p2 * r2 * r3 * q3,
        -2 * r1 * q1 * r2 * q2 * p3 * r3,
        -2 * r1 * q1 * p2 * r2 * r3 * q3,
        -2 * p1 * r1 * r2 * q2 * r3 * q3,
    ]


@dataclass(frozen=True)
class EighteenReport:
    c: Any
    fitted_from: int                  # 1-based identity used to fit c
    lhs: tuple[Any, ...]
    rhs: tuple[Any, ...]              # c times the right-hand polynomials
    residuals: tuple[Any, ...]
    c_modulus_residual: Any           # |c| against |det Omega2' / det Omega2|
    r1_residual: Any                  # product of the first four against c^4 R1
    r2_residual: Any                  # product of the last fourteen against 2^14 c^14 prod(...)
    tau_prime: RiemannMatrix

    def max_residual(self) -> Any:
        return max(self.residuals + (self.c_modulus_residual, self.r1_residual, self.r2_residual))

    def passed(self, p: int) -> bool:
        return self.max_residual() < _tolerance(p)


def eighteen_identities(
    u: UniformizedTriple,
    n: SymplecticMatrix | None = None,
    workers: int = 1,
) -> EighteenReport:
    """
    Fits c from the first identity (or, when its right side nearly vanishes,
    from the one with the largest right side) and checks the others.
    """
    p = u.precision
    quotient = omega_prime(u, n)
    chars = [ch for pair in IDENTITY_PAIRS for ch in pair]
    values = theta_nulls(chars, quotient.tau, p, workers=workers)
    with mp.workprec(p + GUARD_BITS):
        lhs = [values[2 * k] * values[2 * k + 1] for k in range(len(IDENTITY_PAIRS))]
        polys = identity_right_sides(u)
        largest = max(range(len(polys)), key=lambda k: abs(polys[k]))
        fit = 0
        if abs(polys[0]) < mp.mpf(2) ** (-(p // 3)) * abs(polys[largest]):
            fit = largest
            print(
                f"[WARN] first identity is nearly degenerate; fitting c from identity {fit + 1}",
                file=sys.stderr,
            )
        if not polys[fit]:
            raise DegenerateLatticeError("all identity right sides vanish")
        c = lhs[fit] / polys[fit]
        rhs = [c * poly for poly in polys]
        residuals = tuple(_relative(left, right) for left, right in zip(lhs, rhs))

        modulus = abs(det_omega2(quotient.period) / det_omega2(u.period_matrix()))
        c_modulus_residual = _relative(abs(c), modulus)
        r1_residual = _relative(_prod(lhs[:4]), c**4 * r1_product(u))
        r2_residual = _relative(_prod(lhs[4:]), mp.mpf(2) ** 14 * c**14 * _theta_weight_product(u))

    return EighteenReport(
        c=c,
        fitted_from=fit + 1,
        lhs=tuple(lhs),
        rhs=tuple(rhs),
        residuals=residuals,
        c_modulus_residual=c_modulus_residual,
        r1_residual=r1_residual,
        r2_residual=r2_residual,
        tau_prime=quotient.tau,
    )


# ---------------------------------------------------------------------------
# Main identity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MainIdentityReport:
    taus: tuple[Any, Any, Any]
    lhs: Any                     # (pi/2)^54 chi18(Omega')
    rhs: Any                     # X(m(Omega)), or the exact X supplied by the caller
    x_closed: Any
    det_m: Any
    residual: Any
    closed_residual: Any         # closed form of X against the direct evaluation
    degenerate: bool
    tau_prime: RiemannMatrix
    timings: dict[str, float] = field(default_factory=dict)

    def passed(self, p: int) -> bool:
        tolerance = _tolerance(p)
        return self.residual < tolerance and self.closed_residual < tolerance


def _natural_scale(u: UniformizedTriple) -> tuple[Any, Any]:
    """(size of det m, size of X) built from the entry magnitudes."""
    size = max(abs(v) for row in u.rows() for v in row)
    det_scale = size**3
    return det_scale, _prod([abs(v) for v in u.a]) ** 4 * _prod([abs(v) for v in u.c]) ** 2 * det_scale


def verify_main_identity(
    taus: Sequence[Any],
    p: int = 256,
    omega2: Sequence[Any] | None = None,
    n: SymplecticMatrix | None = None,
    expected_x: Fraction | None = None,
    workers: int = 1,
    uniformized: UniformizedTriple | None = None,
) -> MainIdentityReport:
    """
    Compares (pi/2)^54 det(Omega2')^-18 chi18(tau(Omega')) with X(m(Omega)).

    Near det m = 0 both sides are tiny and the residual is taken against the
    natural size of X instead of the larger side.
    """
    timings: dict[str, float] = {}
    start = time.perf_counter()
    u = uniformized or coefficients_from_tau(taus, omega2, p)
    timings["uniformize"] = time.perf_counter() - start

    start = time.perf_counter()
    quotient = omega_prime(u, n)
    chi = chi_period(quotient.period, workers=workers)
    timings["chi18"] = time.perf_counter() - start

    with mp.workprec(p + GUARD_BITS):
        lhs = (mp.pi / 2) ** 54 * chi
        direct = u.x_direct()
        closed = x_closed(u)
        rhs = _mpf(expected_x) if expected_x is not None else direct
        det_m = u.det_m()
        det_scale, x_scale = _natural_scale(u)
        degenerate = abs(det_m) < mp.mpf(2) ** (-(p // 3)) * det_scale
        if degenerate:
            residual = abs(lhs - rhs) / x_scale
            closed_residual = abs(closed - direct) / x_scale
        else:
            residual = _relative(lhs, rhs)
            closed_residual = _relative(closed, direct)
    return MainIdentityReport(
        taus=u.taus,
        lhs=lhs,
        rhs=rhs,
        x_closed=closed,
        det_m=det_m,
        residual=residual,
        closed_residual=closed_residual,
        degenerate=degenerate,
        tau_prime=quotient.tau,
        timings=timings,
    )


def verify_grid(
    triples: Sequence[Sequence[Any]],
    p: int = 128,
    workers: int = 1,
) -> list[MainIdentityReport]:
    """
    Main identity on each triple, in input order. Grid points run in separate
    processes: mpmath precision is process-global.
    """
    if workers <= 1:
        return [verify_main_identity(t, p) for t in triples]
    indexed: list[tuple[int, MainIdentityReport]] = []
    with ProcessPoolExecutor(max_workers=workers) as executor:
        future_map = {
            executor.submit(verify_main_identity, tuple(t), p): index
            for index, t in enumerate(triples)
        }
        for future in as_completed(future_map):
            indexed.append((future_map[future], future.result()))
    # as_completed yields in completion order
    indexed.sort(key=lambda item: item[0])
    return [report for _, report in indexed]


# ---------------------------------------------------------------------------
# Periods of y^2 = x(x^2 - 4bx - 4c)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipticPeriods:
    omega1: Any
    omega2: Any
    tau: Any
    zero_root: str        # "e1", "e2" or "e3": position of the root 0 among e1 > e2 > e3
    residual: Any         # round trip of (b, c) through the theta formulas


def elliptic_periods(b: Fraction | int, c: Fraction | int, p: int = 256) -> EllipticPeriods:
    """
    Period basis (omega1, omega2) with (0, 0) at omega2 / 2, from AGMs of the
    real root differences. Curves with complex two-torsion are unsupported.
    """
    b, c = Fraction(b), Fraction(c)
    delta = b * b + c
    if c == 0 or delta == 0:
        raise InvalidMarkedTripleError(f"y^2 = x(x^2 - 4({b})x - 4({c})) is singular")
    if delta < 0:
        raise UnsupportedConfigurationError(f"b^2 + c = {delta} < 0: two-torsion is not real")

    # the other two roots multiply to -4c and add to 4b
    if c > 0:
        zero_root = "e2"
    elif b > 0:
        zero_root = "e3"
    else:
        zero_root = "e1"

    with mp.workprec(p + GUARD_BITS):
        bb, cc, s = _mpf(b), _mpf(c), mp.sqrt(_mpf(delta))
        e1, e2, e3 = sorted((mp.mpf(0), 2 * bb + 2 * s, 2 * bb - 2 * s), reverse=True)
        omega_r = mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e1 - e2))
        omega_i = mp.mpc(0, 1) * mp.pi / mp.agm(mp.sqrt(e1 - e3), mp.sqrt(e2 - e3))
        if zero_root == "e1":
            omega2, omega1 = mp.mpc(omega_r), omega_i
        elif zero_root == "e2":
            omega2, omega1 = omega_r + omega_i, omega_i
        else:
            omega2, omega1 = omega_i, mp.mpc(-omega_r)
        tau = omega1 / omega2
        if tau.imag <= 0:
            raise PeriodComputationError(f"period ratio {mp.nstr(tau, 8)} is not in the upper half plane")

        t00, t01 = theta_nulls([_THETA_00, _THETA_01], RiemannMatrix(((tau,),), p))
        b_back = -mp.pi**2 / (4 * omega2**2) * (t00**4 + t01**4)
        c_back = -mp.pi**4 / (4 * omega2**4) * t00**4 * t01**4
        residual = max(
            abs(b_back - bb) / max(abs(bb), mp.sqrt(abs(cc))),
            abs(c_back - cc) / abs(cc),
        )
    if residual > _tolerance(p):
        raise PeriodComputationError(
            f"periods do not reproduce (b, c) = ({b}, {c}): residual {mp.nstr(residual, 5)}"
        )
    return EllipticPeriods(omega1=omega1, omega2=omega2, tau=tau, zero_root=zero_root, residual=residual)


# ---------------------------------------------------------------------------
# Closing the loop for a rational Ciani matrix
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorollaryReport:
    matrix: CianiMatrix
    cofactor: CianiMatrix
    d_value: Fraction                   # D(m)
    x_value: Fraction                   # X(Cof m)
    discriminant: Fraction              # Disc(Q_m) from the Sylvester determinant
    periods: tuple[EllipticPeriods, ...]
    shifted: bool                       # tau_1 replaced by tau_1 + 1
    coefficient_residual: Any           # m(Omega) against Cof m
    main: MainIdentityReport

    def passed(self, p: int) -> bool:
        return self.coefficient_residual < _tolerance(p) and self.main.passed(p)


def verify_klein_corollary(m: CianiMatrix, p: int = 256, workers: int = 1) -> CorollaryReport:
    """
    (pi/2)^54 chi18(Omega') = X(Cof m) = D(m)^2 = (2^-54 Disc Q_m)^2, with the
    last two equalities exact and the first numeric on lattices built from
    the curves of Cof m.
    """
    if not m.in_s_times:
        raise NotInCianiDomainError("the corollary needs m in S with det m != 0")
    cof = cofactor_matrix(m)
    d_value = closed_discriminant(m)
    x_value = x_invariant(cof)
    if x_value != d_value**2:
        raise IdentityCheckError(f"X(Cof m) = {x_value} differs from D(m)^2 = {d_value**2}")
    disc = discriminant_quartic(ciani_form(m))
    if disc != 2**54 * d_value:
        raise IdentityCheckError(f"Disc(Q_m) = {disc} differs from 2^54 D(m)")

    marked = ab_of(cof)
    periods = tuple(
        elliptic_periods(marked.base.b[i], marked.base.c[i], p) for i in range(3)
    )
    taus = [period.tau for period in periods]
    omega2 = [period.omega2 for period in periods]
    u = coefficients_from_tau(taus, omega2, p)
    shifted = False
    with mp.workprec(p + GUARD_BITS):
        if mp.re(u.a[0]) * _mpf(cof.a[0]) < 0:
            taus[0] = taus[0] + 1
            shifted = True
    if shifted:
        u = coefficients_from_tau(taus, omega2, p)

    with mp.workprec(p + GUARD_BITS):
        target = [[_mpf(v) for v in row] for row in cof.rows()]
        size = max(abs(v) for row in target for v in row)
        coefficient_residual = max(
            abs(got - want) / size for got_row, want_row in zip(u.rows(), target) for got, want in zip(got_row, want_row)
        )

    main = verify_main_identity(taus, p, omega2=omega2, expected_x=x_value, workers=workers, uniformized=u)
    return CorollaryReport(
        matrix=m,
        cofactor=cof,
        d_value=d_value,
        x_value=x_value,
        discriminant=disc,
        periods=periods,
        shifted=shifted,
        coefficient_residual=coefficient_residual,
        main=main,
    )


# ---------------------------------------------------------------------------
# Hyperelliptic locus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HyperellipticPoint:
    t: Any
    taus: tuple[Any, Any, Any]
    det_m: Any


def hyperelliptic_point(
    tau1: Any = None,
    tau2: Any = None,
    bracket: tuple[float, float] = (1.0, 3.0),
    p: int = 256,
) -> HyperellipticPoint:
    """
    Root of t -> det m(Omega(tau1, tau2, i t)) in the bracket. For purely
    imaginary tau1, tau2 the determinant is real along the path.
    """
    with mp.workprec(p + GUARD_BITS):
        tau1 = mp.mpc(0, 1) if tau1 is None else mp.mpc(tau1)
        tau2 = mp.mpc(0, 1) if tau2 is None else mp.mpc(tau2)

        def det_along(t: Any) -> Any:
            return mp.re(coefficients_from_tau((tau1, tau2, mp.mpc(0, t)), None, p).det_m())

        lo, hi = mp.mpf(bracket[0]), mp.mpf(bracket[1])
        if det_along(lo) * det_along(hi) > 0:
            raise UnsupportedConfigurationError(
                f"det m keeps its sign on [{bracket[0]}, {bracket[1]}]; no root is bracketed"
            )
        try:
            t = mp.findroot(det_along, (lo, hi), solver="anderson")
        except (ValueError, ZeroDivisionError) as exc:
            raise RootNotFoundError(f"root finding on det m failed: {exc}") from exc
        t = mp.re(t)
        if not lo <= t <= hi:
            raise RootNotFoundError(f"root t = {mp.nstr(t, 10)} left the bracket")
        taus = (tau1, tau2, mp.mpc(0, t))
        det_m = coefficients_from_tau(taus, None, p).det_m()
    return HyperellipticPoint(t=t, taus=taus, det_m=det_m)


@dataclass(frozen=True)
class ProfilePoint:
    offset: Any
    det_m: Any
    lhs: Any
    rhs: Any
    ratio: Any


def degeneration_profile(
    point: HyperellipticPoint,
    offsets: Sequence[Any],
    p: int = 256,
) -> list[ProfilePoint]:
    """Both sides of the main identity at tau_3 = i (t + h) as h -> 0."""
    profile: list[ProfilePoint] = []
    for h in offsets:
        with mp.workprec(p + GUARD_BITS):
            taus = (point.taus[0], point.taus[1], mp.mpc(0, point.t + mp.mpf(h)))
        report = verify_main_identity(taus, p)
        with mp.workprec(p + GUARD_BITS):
            ratio = report.lhs / report.rhs if report.rhs else mp.mpc(mp.nan)
        profile.append(ProfilePoint(offset=mp.mpf(h), det_m=report.det_m, lhs=report.lhs, rhs=report.rhs, ratio=ratio))
    return profile
