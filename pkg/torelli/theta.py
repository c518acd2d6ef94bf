"""
Thetanullwerte, the modular forms chi_k and Sigma140, and the Igusa
classification of principally polarized abelian threefolds.

    theta[eps1; eps2](tau) = sum_n exp(pi i [(n + eps1/2) tau (n + eps1/2) + (n + eps1/2) . eps2])

The sum runs over the lattice points with (n + eps1/2) Im(tau) (n + eps1/2) <= B,
B chosen so the discarded Gaussian tail is below 2^(-p-8).

Working precision is process-wide (mpmath.mp). Every public entry point runs
under mp.workprec(p + GUARD_BITS); thread pools are only started from inside
that context, and workers never change precision themselves.
"""
import math
import random
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Any, Sequence

from mpmath import mp

from torelli.config import debug_enabled
from torelli.errors import (
    GenusOutOfRangeError,
    IllConditionedError,
    InvalidRiemannMatrixError,
    PrecisionTooLowError,
    SubgroupMembershipError,
)
from torelli.symplectic import (
    IntMatrix,
    Subgroup,
    SymplecticMatrix,
    ThetaCharacteristic,
    char_action,
    phi,
    subgroup_membership,
)

GUARD_BITS: int = 32
MIN_PRECISION: int = 32

ComplexRows = tuple[tuple[Any, ...], ...]


def _check_precision(p: int) -> None:
    if p < MIN_PRECISION:
        raise PrecisionTooLowError(f"precision must be at least {MIN_PRECISION} bits, got {p}")


# ---------------------------------------------------------------------------
# mpmath matrix plumbing
# ---------------------------------------------------------------------------

def _to_matrix(rows: Sequence[Sequence[Any]]) -> Any:
    out = mp.matrix(len(rows), len(rows[0]))
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            out[i, j] = v
    return out


def _from_matrix(m: Any) -> ComplexRows:
    return tuple(tuple(mp.mpc(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def _int_to_matrix(rows: IntMatrix) -> Any:
    return _to_matrix([[mp.mpf(v) for v in row] for row in rows])


def _conj(m: Any) -> Any:
    out = mp.matrix(m.rows, m.cols)
    for i in range(m.rows):
        for j in range(m.cols):
            out[i, j] = mp.conj(m[i, j])
    return out


def _transpose(m: Any) -> Any:
    out = mp.matrix(m.cols, m.rows)
    for i in range(m.rows):
        for j in range(m.cols):
            out[j, i] = m[i, j]
    return out


def _guarded_inverse(m: Any, p: int, what: str) -> Any:
    try:
        inverse = mp.inverse(m)
    except ZeroDivisionError as exc:
        raise IllConditionedError(f"{what} is singular at working precision") from exc
    condition = mp.mnorm(m, 1) * mp.mnorm(inverse, 1)
    if condition > mp.mpf(2) ** (p // 2):
        raise IllConditionedError(f"{what} has condition number {mp.nstr(condition, 5)}")
    return inverse


def _is_positive_definite(m: Any) -> bool:
    try:
        mp.cholesky(m)
    except (ValueError, ZeroDivisionError):
        return False
    return True


# ---------------------------------------------------------------------------
# Riemann and period matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RiemannMatrix:
    """Symmetric g x g complex matrix with positive definite imaginary part."""
    tau: ComplexRows
    precision: int

    def __post_init__(self) -> None:
        _check_precision(self.precision)
        g = len(self.tau)
        if g == 0 or any(len(row) != g for row in self.tau):
            raise InvalidRiemannMatrixError("tau must be a non-empty square matrix")
        with mp.workprec(self.precision + GUARD_BITS):
            entries = [[mp.mpc(v) for v in row] for row in self.tau]
            tolerance = mp.mpf(2) ** (1 - self.precision)
            for i in range(g):
                for j in range(i + 1, g):
                    size = max(mp.mpf(1), abs(entries[i][j]), abs(entries[j][i]))
                    if abs(entries[i][j] - entries[j][i]) > tolerance * size:
                        raise InvalidRiemannMatrixError(f"tau is not symmetric at ({i}, {j})")
                    mean = (entries[i][j] + entries[j][i]) / 2
                    entries[i][j] = entries[j][i] = mean
            if not _is_positive_definite(_to_matrix([[v.imag for v in row] for row in entries])):
                raise InvalidRiemannMatrixError("Im(tau) is not positive definite")
        object.__setattr__(self, "tau", tuple(tuple(row) for row in entries))

    @classmethod
    def diagonal(cls, values: Sequence[Any], precision: int) -> "RiemannMatrix":
        g = len(values)
        with mp.workprec(precision + GUARD_BITS):
            rows = [[mp.mpc(values[i]) if i == j else mp.mpc(0) for j in range(g)] for i in range(g)]
        return cls(tuple(tuple(r) for r in rows), precision)

    @classmethod
    def from_strings(cls, re_rows: Sequence[Sequence[str]], im_rows: Sequence[Sequence[str]], precision: int) -> "RiemannMatrix":
        _check_precision(precision)
        with mp.workprec(precision + GUARD_BITS):
            rows = tuple(
                tuple(mp.mpc(mp.mpf(r), mp.mpf(i)) for r, i in zip(re_row, im_row))
                for re_row, im_row in zip(re_rows, im_rows)
            )
        return cls(rows, precision)

    @property
    def g(self) -> int:
        return len(self.tau)

    def matrix(self) -> Any:
        return _to_matrix(self.tau)

    def imag_matrix(self) -> Any:
        return _to_matrix([[v.imag for v in row] for row in self.tau])

    def scaled(self, factor: Any) -> "RiemannMatrix":
        with mp.workprec(self.precision + GUARD_BITS):
            rows = tuple(tuple(v * factor for v in row) for row in self.tau)
        return RiemannMatrix(rows, self.precision)


@dataclass(frozen=True)
class RiemannConditions:
    isotropy_residual: Any    # |Omega J tOmega| relative to |Omega1| |Omega2|
    hermitian_residual: Any
    positive: bool

    def holds(self, p: int) -> bool:
        tolerance = mp.mpf(2) ** (-(p // 2))
        return self.positive and self.isotropy_residual < tolerance and self.hermitian_residual < tolerance


def riemann_conditions(omega1: Any, omega2: Any, p: int) -> RiemannConditions:
    """Omega J tOmega = 0 and 2i (conj(Omega) J^-1 tOmega)^-1 positive definite Hermitian."""
    with mp.workprec(p + GUARD_BITS):
        o1, o2 = _to_matrix(omega1), _to_matrix(omega2)
        g = o1.rows
        scale_ = max(mp.mnorm(o1, 1) * mp.mnorm(o2, 1), mp.mpf(2) ** (-p))
        isotropy = mp.mnorm(o1 * _transpose(o2) - o2 * _transpose(o1), 1) / scale_

        pairing = _conj(o2) * _transpose(o1) - _conj(o1) * _transpose(o2)
        try:
            h = mp.mpc(0, 2) * mp.inverse(pairing)
        except ZeroDivisionError:
            return RiemannConditions(isotropy, mp.inf, False)
        hermitian = mp.mnorm(h - _conj(_transpose(h)), 1) / max(mp.mnorm(h, 1), mp.mpf(2) ** (-p))
        # real symmetric embedding of H; positive definite iff H is
        embedded = mp.matrix(2 * g, 2 * g)
        for i in range(g):
            for j in range(g):
                hij = (h[i, j] + mp.conj(h[j, i])) / 2
                embedded[i, j] = embedded[g + i, g + j] = hij.real
                embedded[i, g + j] = -hij.imag
                embedded[g + i, j] = hij.imag
        return RiemannConditions(isotropy, hermitian, _is_positive_definite(embedded))


@dataclass(frozen=True)
class PeriodMatrix:
    """Omega = [Omega1 Omega2], g x 2g, satisfying the Riemann conditions."""
    omega1: ComplexRows
    omega2: ComplexRows
    precision: int

    def __post_init__(self) -> None:
        _check_precision(self.precision)
        g = len(self.omega1)
        if len(self.omega2) != g or any(len(r) != g for r in self.omega1 + self.omega2):
            raise InvalidRiemannMatrixError("Omega1 and Omega2 must both be g x g")
        with mp.workprec(self.precision + GUARD_BITS):
            o1 = tuple(tuple(mp.mpc(v) for v in row) for row in self.omega1)
            o2 = tuple(tuple(mp.mpc(v) for v in row) for row in self.omega2)
        object.__setattr__(self, "omega1", o1)
        object.__setattr__(self, "omega2", o2)
        report = riemann_conditions(o1, o2, self.precision)
        if not report.holds(self.precision):
            raise InvalidRiemannMatrixError(
                "period matrix violates the Riemann conditions "
                f"(isotropy {mp.nstr(report.isotropy_residual, 5)}, positive={report.positive})"
            )

    @property
    def g(self) -> int:
        return len(self.omega1)

    @classmethod
    def from_tau(cls, tau: RiemannMatrix) -> "PeriodMatrix":
        """Omega = [tau, 1]."""
        one = tuple(tuple(mp.mpc(int(i == j)) for j in range(tau.g)) for i in range(tau.g))
        return cls(tau.tau, one, tau.precision)


# ---------------------------------------------------------------------------
# Characteristics
# ---------------------------------------------------------------------------

def classify_parity(eps: ThetaCharacteristic) -> str:
    return "even" if eps.is_even else "odd"


def enumerate_chars(g: int) -> tuple[list[ThetaCharacteristic], list[ThetaCharacteristic]]:
    """(even, odd) characteristics with 0/1 entries, each sorted by (eps1, eps2)."""
    even: list[ThetaCharacteristic] = []
    odd: list[ThetaCharacteristic] = []
    for eps1 in product((0, 1), repeat=g):
        for eps2 in product((0, 1), repeat=g):
            char = ThetaCharacteristic(eps1, eps2)
            (even if char.is_even else odd).append(char)
    if len(even) != 2 ** (g - 1) * (2**g + 1) or len(odd) != 2 ** (g - 1) * (2**g - 1):
        raise GenusOutOfRangeError(f"characteristic counts are off for g = {g}")
    return even, odd


def chi_weight(g: int) -> int:
    """k = |S_g| / 2."""
    return 2 ** (g - 1) * (2**g + 1) // 2


# ---------------------------------------------------------------------------
# Lattice enumeration
# ---------------------------------------------------------------------------

def _lower_eigen_bound(y: Any) -> Any:
    """Gershgorin lower bound on the spectrum of Im(tau), eigenvalues when that is not positive."""
    n = y.rows
    bound = min(y[i, i] - sum(abs(y[i, j]) for j in range(n) if j != i) for i in range(n))
    if bound > 0:
        return bound
    eigenvalues, _ = mp.eigsy(y)
    smallest = min(eigenvalues[i] for i in range(n))
    if smallest <= 0:
        raise InvalidRiemannMatrixError("Im(tau) is not positive definite")
    return smallest


def truncation_bound(lam: float, g: int, p: int, radius_scale: float = 1.0) -> float:
    """
    Smallest B (fixed point) with 2 (2 sqrt((B+1)/lam) + 1)^g exp(-pi B) <= 2^(-p-8).
    """
    target = (p + 8) * math.log(2)
    bound = target / math.pi
    for _ in range(100):
        nxt = (target + math.log(2) + g * math.log(2 * math.sqrt((bound + 1) / lam) + 1)) / math.pi
        if abs(nxt - bound) < 1e-9:
            bound = nxt
            break
        bound = nxt
    return bound * radius_scale**2


def _ellipsoid_points(r: list[list[float]], shift: Sequence[float], bound: float) -> list[tuple[int, ...]]:
    """
    Integer n with (n + shift)^T Y (n + shift) <= bound, where Y = R^T R and R
    is upper triangular. Enumerates the last coordinate first.
    """
    g = len(r)
    slack = 1e-9 * (1 + bound)
    points: list[tuple[int, ...]] = []
    xs = [0.0] * g
    ns = [0] * g

    def descend(i: int, used: float) -> None:
        remaining = bound - used
        if remaining < -slack:
            return
        tail = sum(r[i][j] * xs[j] for j in range(i + 1, g))
        center = -tail / r[i][i]
        width = math.sqrt(max(remaining, 0.0) + slack) / r[i][i]
        lo = math.ceil(center - width - shift[i] - 1e-9)
        hi = math.floor(center + width - shift[i] + 1e-9)
        for n in range(lo, hi + 1):
            x = n + shift[i]
            t = r[i][i] * x + tail
            total = used + t * t
            if total > bound + slack:
                continue
            xs[i], ns[i] = x, n
            if i == 0:
                points.append(tuple(ns))
            else:
                descend(i - 1, total)

    descend(g - 1, 0.0)
    return points


@dataclass(frozen=True)
class _Lattice:
    r: list[list[float]]
    bound: float


def _lattice_for(tau: RiemannMatrix, p: int, radius_scale: float) -> _Lattice:
    y = tau.imag_matrix()
    lam = float(_lower_eigen_bound(y))
    bound = truncation_bound(lam, tau.g, p, radius_scale)
    with mp.workprec(53):
        lower = mp.cholesky(y)
    g = tau.g
    r = [[float(lower[j, i]) for j in range(g)] for i in range(g)]
    return _Lattice(r=r, bound=bound)


_PHASES = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _theta_group(
    tau: ComplexRows,
    eps1: tuple[int, ...],
    eps2_list: Sequence[tuple[int, ...]],
    lattice: _Lattice,
) -> list[Any]:
    """All theta[eps1; eps2] for one top row; one lattice walk shared across eps2."""
    g = len(eps1)
    points = _ellipsoid_points(lattice.r, [e / 2 for e in eps1], lattice.bound)
    diag = [tau[i][i] for i in range(g)]
    off = [(i, j, 2 * tau[i][j]) for i in range(g) for j in range(i + 1, g)]
    sums = [mp.mpc(0) for _ in eps2_list]
    for n in points:
        u = [2 * n[i] + eps1[i] for i in range(g)]
        s = mp.fsum(diag[i] * (u[i] * u[i]) for i in range(g)) + mp.fsum(t * (u[i] * u[j]) for i, j, t in off)
        term = mp.expjpi(s / 4)
        for k, eps2 in enumerate(eps2_list):
            if sum(a * b for a, b in zip(n, eps2)) % 2:
                sums[k] -= term
            else:
                sums[k] += term
    out = []
    for eps2, total in zip(eps2_list, sums):
        re_, im_ = _PHASES[sum(a * b for a, b in zip(eps1, eps2)) % 4]
        out.append(total * mp.mpc(re_, im_))
    if debug_enabled():
        print(f"[DEBUG] theta group {eps1}: {len(points)} lattice points, B={lattice.bound:.2f}", file=sys.stderr)
    return out


# ---------------------------------------------------------------------------
# Theta constants
# ---------------------------------------------------------------------------

def theta_nulls(
    chars: Sequence[ThetaCharacteristic],
    tau: RiemannMatrix,
    p: int | None = None,
    radius_scale: float = 1.0,
    workers: int = 1,
) -> list[Any]:
    """
    theta[eps](tau) for each characteristic, in input order. Characteristics
    sharing a top row share one lattice enumeration; groups may run on a pool.
    """
    p = tau.precision if p is None else p
    _check_precision(p)
    for c in chars:
        if c.g != tau.g:
            raise GenusOutOfRangeError(f"characteristic of genus {c.g} for tau of genus {tau.g}")

    groups: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for c in chars:
        bucket = groups.setdefault(c.eps1, [])
        if c.eps2 not in bucket:
            bucket.append(c.eps2)

    values: dict[tuple[tuple[int, ...], tuple[int, ...]], Any] = {}
    with mp.workprec(p + GUARD_BITS):
        lattice = _lattice_for(tau, p, radius_scale)
        ordered = sorted(groups)
        if workers <= 1 or len(ordered) == 1:
            for eps1 in ordered:
                for eps2, v in zip(groups[eps1], _theta_group(tau.tau, eps1, groups[eps1], lattice)):
                    values[(eps1, eps2)] = v
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                future_map = {
                    executor.submit(_theta_group, tau.tau, eps1, groups[eps1], lattice): eps1
                    for eps1 in ordered
                }
                for future in as_completed(future_map):
                    eps1 = future_map[future]
                    for eps2, v in zip(groups[eps1], future.result()):
                        values[(eps1, eps2)] = v
    return [values[(c.eps1, c.eps2)] for c in chars]


def theta_null(
    eps: ThetaCharacteristic,
    tau: RiemannMatrix,
    p: int | None = None,
    radius_scale: float = 1.0,
) -> Any:
    return theta_nulls([eps], tau, p, radius_scale)[0]


def _product(values: Sequence[Any]) -> Any:
    out = mp.mpc(1)
    for v in values:
        out *= v
    return out


def chi_k(tau: RiemannMatrix, p: int | None = None, workers: int = 1) -> Any:
    """Product of the even theta constants, multiplied in sorted characteristic order."""
    if tau.g < 2:
        raise GenusOutOfRangeError(f"chi_k needs g >= 2, got {tau.g}")
    p = tau.precision if p is None else p
    even, _ = enumerate_chars(tau.g)
    values = theta_nulls(even, tau, p, workers=workers)
    with mp.workprec(p + GUARD_BITS):
        return _product(values)


def _sigma_from_values(values: Sequence[Any]) -> Any:
    """e_(n-1) of the eighth powers by prefix/suffix products; defined with zeros present."""
    powers = sorted((v**8 for v in values), key=lambda z: (z.real, z.imag))
    n = len(powers)
    prefix = [mp.mpc(1)] * (n + 1)
    suffix = [mp.mpc(1)] * (n + 1)
    for i in range(n):
        prefix[i + 1] = prefix[i] * powers[i]
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] * powers[i]
    return mp.fsum(prefix[i] * suffix[i + 1] for i in range(n))


def sigma140(tau: RiemannMatrix, p: int | None = None, workers: int = 1) -> Any:
    if tau.g != 3:
        raise GenusOutOfRangeError(f"Sigma140 is defined for g = 3, got {tau.g}")
    p = tau.precision if p is None else p
    even, _ = enumerate_chars(3)
    values = theta_nulls(even, tau, p, workers=workers)
    with mp.workprec(p + GUARD_BITS):
        return _sigma_from_values(values)


# ---------------------------------------------------------------------------
# Igusa classification
# ---------------------------------------------------------------------------

class IgusaLabel(str, Enum):
    DECOMPOSABLE = "Decomposable"
    HYPERELLIPTIC = "HyperellipticJacobian"
    NON_HYPERELLIPTIC = "NonHyperellipticJacobian"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class VanishingPolicy:
    """A normalized value is zero below 2^(-zero_fraction p), nonzero above 2^(-nonzero_fraction p)."""
    zero_fraction: float = 1 / 3
    nonzero_fraction: float = 1 / 6

    def thresholds(self, p: int) -> tuple[Any, Any]:
        return mp.mpf(2) ** (-self.zero_fraction * p), mp.mpf(2) ** (-self.nonzero_fraction * p)


@dataclass(frozen=True)
class IgusaResult:
    label: IgusaLabel
    chi18: Any
    sigma140: Any
    magnitudes: tuple[Any, ...]     # sorted even theta magnitudes over the largest
    zero_count: int
    band_count: int


def igusa_classify(
    tau: RiemannMatrix,
    p: int | None = None,
    policy: VanishingPolicy = VanishingPolicy(),
    workers: int = 1,
) -> IgusaResult:
    """
    chi18 vanishes iff some even theta constant does, Sigma140 iff at least two
    do; the decision is made on the normalized magnitudes with a guard band.
    """
    if tau.g != 3:
        raise GenusOutOfRangeError(f"Igusa classification is for g = 3, got {tau.g}")
    p = tau.precision if p is None else p
    even, _ = enumerate_chars(3)
    values = theta_nulls(even, tau, p, workers=workers)
    with mp.workprec(p + GUARD_BITS):
        chi = _product(values)
        sigma = _sigma_from_values(values)
        largest = max(abs(v) for v in values)
        magnitudes = tuple(sorted(abs(v) / largest for v in values))
        zero_at, nonzero_at = policy.thresholds(p)
        zero_count = sum(1 for m in magnitudes if m < zero_at)
        band_count = sum(1 for m in magnitudes if zero_at <= m <= nonzero_at)

    if zero_count >= 2:
        label = IgusaLabel.DECOMPOSABLE
    elif band_count:
        label = IgusaLabel.INDETERMINATE
    elif zero_count == 1:
        label = IgusaLabel.HYPERELLIPTIC
    else:
        label = IgusaLabel.NON_HYPERELLIPTIC
    return IgusaResult(label, chi, sigma, magnitudes, zero_count, band_count)


# ---------------------------------------------------------------------------
# Modular action
# ---------------------------------------------------------------------------

def _blocks_mp(m: SymplecticMatrix) -> tuple[Any, Any, Any, Any]:
    return tuple(_int_to_matrix(b) for b in m.blocks)


def j_factor(m: SymplecticMatrix, tau: RiemannMatrix) -> Any:
    """j(M, tau) = det(C tau + D)."""
    with mp.workprec(tau.precision + GUARD_BITS):
        _, _, c, d = _blocks_mp(m)
        x = c * tau.matrix() + d
        _guarded_inverse(x, tau.precision, "C tau + D")
        return mp.det(x)


def act(m: SymplecticMatrix, tau: RiemannMatrix) -> RiemannMatrix:
    """M.tau = (A tau + B)(C tau + D)^-1."""
    if m.g != tau.g:
        raise GenusOutOfRangeError(f"matrix of genus {m.g} acting on tau of genus {tau.g}")
    with mp.workprec(tau.precision + GUARD_BITS):
        a, b, c, d = _blocks_mp(m)
        t = tau.matrix()
        image = (a * t + b) * _guarded_inverse(c * t + d, tau.precision, "C tau + D")
        rows = _from_matrix(image)
    return RiemannMatrix(rows, tau.precision)


def tau_of_omega(omega: PeriodMatrix) -> RiemannMatrix:
    """tau(Omega) = Omega2^-1 Omega1."""
    with mp.workprec(omega.precision + GUARD_BITS):
        o1, o2 = _to_matrix(omega.omega1), _to_matrix(omega.omega2)
        rows = _from_matrix(_guarded_inverse(o2, omega.precision, "Omega2") * o1)
    return RiemannMatrix(rows, omega.precision)


def period_act(omega: PeriodMatrix, m: SymplecticMatrix) -> PeriodMatrix:
    """Omega.M = [Omega1 A + Omega2 C, Omega1 B + Omega2 D]."""
    with mp.workprec(omega.precision + GUARD_BITS):
        a, b, c, d = _blocks_mp(m)
        o1, o2 = _to_matrix(omega.omega1), _to_matrix(omega.omega2)
        return PeriodMatrix(_from_matrix(o1 * a + o2 * c), _from_matrix(o1 * b + o2 * d), omega.precision)


def det_omega2(omega: PeriodMatrix) -> Any:
    with mp.workprec(omega.precision + GUARD_BITS):
        return mp.det(_to_matrix(omega.omega2))


def chi_period(omega: PeriodMatrix, k: int | None = None, workers: int = 1) -> Any:
    """det(Omega2)^-k chi_k(tau(Omega)); invariant under Omega -> Omega.M."""
    weight = chi_weight(omega.g)
    if k is not None and k != weight:
        raise GenusOutOfRangeError(f"chi_k has weight {weight} in genus {omega.g}, got k = {k}")
    value = chi_k(tau_of_omega(omega), omega.precision, workers=workers)
    with mp.workprec(omega.precision + GUARD_BITS):
        return value / det_omega2(omega) ** weight


def _relative(lhs: Any, rhs: Any) -> Any:
    size = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / size if size else mp.mpf(0)


def chi18_half_modularity(m: SymplecticMatrix, tau: RiemannMatrix, workers: int = 1) -> Any:
    """Relative residual of chi_k((M.tau)/2) = j(M, tau)^k chi_k(tau/2) for M in Gamma^0(2)."""
    if not subgroup_membership(m, Subgroup.UPPER_LEVEL_TWO):
        raise SubgroupMembershipError("M is outside Gamma^0(2)")
    p = tau.precision
    weight = chi_weight(tau.g)
    with mp.workprec(p + GUARD_BITS):
        half = mp.mpf(1) / 2
        lhs = chi_k(act(m, tau).scaled(half), p, workers)
        rhs = j_factor(m, tau) ** weight * chi_k(tau.scaled(half), p, workers)
        return _relative(lhs, rhs)


# ---------------------------------------------------------------------------
# Identity checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResidual:
    lhs: Any
    rhs: Any
    residual: Any      # |lhs - rhs| / scale
    scale: Any


def duplication_check(
    eps1: Sequence[int],
    eps2: Sequence[int],
    delta: Sequence[int],
    tau: RiemannMatrix,
) -> IdentityResidual:
    """
    theta[e1;e2](tau/2) theta[e1;d](tau/2)
        = sum_mu (-1)^(mu.d) theta[e1-mu; e2-d](tau) theta[mu; e2-d](tau).
    """
    g = tau.g
    if not (len(eps1) == len(eps2) == len(delta) == g):
        raise GenusOutOfRangeError("characteristic rows must match the genus of tau")
    p = tau.precision
    lower = tuple(a - b for a, b in zip(eps2, delta))
    mus = list(product((0, 1), repeat=g))
    with mp.workprec(p + GUARD_BITS):
        half = tau.scaled(mp.mpf(1) / 2)
        left = theta_nulls(
            [ThetaCharacteristic(tuple(eps1), tuple(eps2)), ThetaCharacteristic(tuple(eps1), tuple(delta))],
            half,
        )
        chars: list[ThetaCharacteristic] = []
        for mu in mus:
            chars.append(ThetaCharacteristic(tuple(a - b for a, b in zip(eps1, mu)), lower))
            chars.append(ThetaCharacteristic(mu, lower))
        right = theta_nulls(chars, tau)
        lhs = left[0] * left[1]
        terms = []
        for k, mu in enumerate(mus):
            sign = -1 if sum(a * b for a, b in zip(mu, delta)) % 2 else 1
            terms.append(sign * right[2 * k] * right[2 * k + 1])
        rhs = mp.fsum(terms)
        scale_ = max(abs(lhs), mp.fsum(abs(t) for t in terms), mp.mpf(2) ** (-p))
        return IdentityResidual(lhs, rhs, abs(lhs - rhs) / scale_, scale_)


@dataclass(frozen=True)
class TransformationReport:
    modulus: IdentityResidual
    phase: IdentityResidual | None     # only on P(Z)
    image: ThetaCharacteristic
    phi: int


def transformation_check(m: SymplecticMatrix, eps: ThetaCharacteristic, tau: RiemannMatrix) -> TransformationReport:
    """
    |theta[M.eps](M.tau)| = |j(M, tau)|^(1/2) |theta[eps](tau)|; on P(Z) also
    theta[M.eps](M.tau)^2 = i^(-phi) theta[eps](tau)^2 (kappa^2 j = det(D)^2 = 1 there).
    """
    p = tau.precision
    image = char_action(m, eps)
    phase_exponent = phi(eps, m)
    with mp.workprec(p + GUARD_BITS):
        moved = act(m, tau)
        lhs = theta_null(image, moved)
        base = theta_null(eps, tau)
        j = j_factor(m, tau)
        rhs_abs = mp.sqrt(abs(j)) * abs(base)
        scale_ = max(abs(lhs), rhs_abs, mp.mpf(1))
        modulus = IdentityResidual(abs(lhs), rhs_abs, abs(abs(lhs) - rhs_abs) / scale_, scale_)

        phase = None
        if subgroup_membership(m, Subgroup.PARABOLIC):
            re_, im_ = _PHASES[(-phase_exponent) % 4]
            expected = mp.mpc(re_, im_) * base**2
            scale2 = max(abs(lhs) ** 2, abs(expected), mp.mpf(1))
            phase = IdentityResidual(lhs**2, expected, abs(lhs**2 - expected) / scale2, scale2)
    return TransformationReport(modulus=modulus, phase=phase, image=image, phi=phase_exponent)


# ---------------------------------------------------------------------------
# Seeded samples
# ---------------------------------------------------------------------------

def random_riemann_matrix(rng: random.Random, g: int, precision: int, spread: float = 0.2) -> RiemannMatrix:
    """Re entries in [-1/2, 1/2]; Im diagonally dominant with diagonal in [0.9, 1.3]."""
    re_rows = [["0"] * g for _ in range(g)]
    im_rows = [["0"] * g for _ in range(g)]
    for i in range(g):
        for j in range(i, g):
            re_rows[i][j] = re_rows[j][i] = repr(round(rng.uniform(-0.5, 0.5), 6))
            if i == j:
                im_rows[i][i] = repr(round(rng.uniform(0.9, 1.3), 6))
            else:
                im_rows[i][j] = im_rows[j][i] = repr(round(rng.uniform(-spread, spread), 6))
    return RiemannMatrix.from_strings(re_rows, im_rows, precision)
