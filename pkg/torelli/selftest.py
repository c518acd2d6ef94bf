"""
Named invariant suites and their runner.

Each check is a function (rng, precision, workers) -> detail string that
raises on failure. run_selftest() catches every failure into the check's
detail, so one broken suite never hides the results of the others.

Suites are seeded independently from (seed, suite name): running one suite
alone gives the same results as running it inside "all".
"""
from __future__ import annotations

import random
import sys
from fractions import Fraction
from typing import Any, Callable

from mpmath import mp

from torelli.ciani import (
    IDENTITY,
    CianiLabel,
    CianiMatrix,
    ab_of,
    ciani_form,
    ciani_matrix_of,
    classify,
    closed_discriminant,
    cofactor_matrix,
    determinant,
    hlp_coefficients,
    hlp_t0,
    mat_of,
    random_ciani_matrix,
    t_invariant,
    x_invariant,
)
from torelli.errors import ConfigurationError, IdentityCheckError, TorelliError
from torelli.klein import coefficients_from_tau, eighteen_identities, verify_klein_corollary, verify_main_identity
from torelli.polycore import TernaryForm, add, monomials, mul, parse_form, partial_derivative, render, substitute_linear
from torelli.resultant import discriminant_quartic, resultant3
from torelli.schemas import CheckResult, SelftestReport, SuiteResult
from torelli.symplectic import (
    SymplecticMatrix,
    count_transporter_cosets,
    decompose_gamma0,
    enumerate_max_isotropic,
    is_symplectic,
    random_gamma0_2,
    random_symplectic,
    transporter_factorization,
)
from torelli.theta import (
    GUARD_BITS,
    RiemannMatrix,
    act,
    chi18_half_modularity,
    chi_k,
    chi_weight,
    duplication_check,
    enumerate_chars,
    j_factor,
    random_riemann_matrix,
    theta_nulls,
)

CheckFn = Callable[[random.Random, int, int], str]

# iterations per randomized check; the test-suite runs the full acceptance counts
ROUNDS: int = 5


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise IdentityCheckError(message)


def _fmt(x: Any) -> str:
    return mp.nstr(x, 3)


def _log2(x: Any) -> str:
    return f"2^{int(mp.floor(mp.log(x, 2)))}" if x > 0 else "0"


# ---------------------------------------------------------------------------
# polycore
# ---------------------------------------------------------------------------

def _check_parse_render(rng: random.Random, p: int, workers: int) -> str:
    for text in ("x^4+y^4+z^4", "(x+y)^4 - 3/2*z^4", "x^2*y*z - y^3*z + 0.25*z^4"):
        f = parse_form(text, 4)
        _require(parse_form(render(f), 4) == f, f"render/parse round trip changed {text!r}")
    return "3 forms"


def _check_substitution_degree(rng: random.Random, p: int, workers: int) -> str:
    for _ in range(ROUNDS):
        q = ciani_form(random_ciani_matrix(rng))
        g = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        _require(substitute_linear(q, g).degree == 4, "substitution changed the degree")
    return f"{ROUNDS} substitutions"


def _check_euler(rng: random.Random, p: int, workers: int) -> str:
    units = [TernaryForm.monomial(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1))]
    for _ in range(ROUNDS):
        degree = rng.randint(1, 6)
        f = TernaryForm.from_dense(degree, [rng.randint(-5, 5) for _ in monomials(degree)])
        total = TernaryForm.zero(degree)
        for axis, unit in enumerate(units, start=1):
            total = add(total, mul(unit, partial_derivative(f, axis)))
        _require(total == f.scale(degree), f"Euler identity fails in degree {degree}")
    return f"{ROUNDS} forms"


def _check_right_action(rng: random.Random, p: int, workers: int) -> str:
    def random_matrix() -> list[list[Fraction]]:
        return [[Fraction(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(3)] for _ in range(3)]

    for _ in range(ROUNDS):
        f = TernaryForm.from_dense(4, [rng.randint(-3, 3) for _ in monomials(4)])
        g, h = random_matrix(), random_matrix()
        gh = [[sum(g[i][k] * h[k][j] for k in range(3)) for j in range(3)] for i in range(3)]
        _require(
            substitute_linear(f, gh) == substitute_linear(substitute_linear(f, g), h),
            "f.(gh) != (f.g).h",
        )
    return f"{ROUNDS} pairs"


# ---------------------------------------------------------------------------
# resultant
# ---------------------------------------------------------------------------

def _check_resultant_normalization(rng: random.Random, p: int, workers: int) -> str:
    value = resultant3(parse_form("x^3"), parse_form("y^3"), parse_form("z^3"))
    _require(value == 1, f"Res(x^3, y^3, z^3) = {value}")
    return "Res(x^3, y^3, z^3) = 1"


def _check_fermat(rng: random.Random, p: int, workers: int) -> str:
    disc = discriminant_quartic(parse_form("x^4+y^4+z^4"))
    _require(disc == 2**54, f"Disc(x^4+y^4+z^4) = {disc}")
    _require(disc == 2**54 * closed_discriminant(IDENTITY), "closed formula disagrees at m = I")
    return "Disc = 2^54"


def _check_split_rules(rng: random.Random, p: int, workers: int) -> str:
    q = ciani_form(random_ciani_matrix(rng))
    greedy = discriminant_quartic(q, "greedy")
    reverse = discriminant_quartic(q, "reverse")
    _require(greedy == reverse, f"greedy {greedy} != reverse {reverse}")
    return "greedy = reverse"


def _random_gl3(rng: random.Random) -> list[list[int]]:
    while True:
        g = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        if determinant(g) != 0:
            return g


def _check_gl3_invariance(rng: random.Random, p: int, workers: int) -> str:
    rounds = max(1, ROUNDS // 2)
    for _ in range(rounds):
        q = ciani_form(random_ciani_matrix(rng, bound=3))
        g = _random_gl3(rng)
        lhs = discriminant_quartic(substitute_linear(q, g))
        rhs = determinant(g) ** 36 * discriminant_quartic(q)
        _require(lhs == rhs, f"Disc(Q.g) != det(g)^36 Disc(Q) for g = {g}")
    return f"{rounds} (Q, g) pairs"


# ---------------------------------------------------------------------------
# ciani
# ---------------------------------------------------------------------------

def _check_closed_discriminant(rng: random.Random, p: int, workers: int) -> str:
    for _ in range(ROUNDS):
        m = random_ciani_matrix(rng)
        _require(discriminant_quartic(ciani_form(m)) == 2**54 * closed_discriminant(m), f"2^54 D != Disc at {m}")
    return f"{ROUNDS} matrices"


def _check_cofactor_identities(rng: random.Random, p: int, workers: int) -> str:
    rounds = ROUNDS * 20
    for _ in range(rounds):
        m = random_ciani_matrix(rng)
        cof = cofactor_matrix(m)
        _require(x_invariant(cof) == closed_discriminant(m) ** 2, f"X(Cof m) != D(m)^2 at {m}")
        _require(cofactor_matrix(cof) == m.scaled(m.det), f"Cof Cof m != det(m) m at {m}")
        _require(mat_of(ab_of(m)) == m, f"Mat(Ab(m)) != m at {m}")
        _require(ciani_matrix_of(ciani_form(m)) == m, f"form round trip changed {m}")
    return f"{rounds} matrices"


def _check_worked_classifications(rng: random.Random, p: int, workers: int) -> str:
    cases = (
        (IDENTITY, CianiLabel.NON_HYPERELLIPTIC, Fraction(1)),
        (CianiMatrix(a=(1, 1, 1), b=(2, 2, 2)), CianiLabel.TWIST, Fraction(5)),
        (CianiMatrix.from_rows([[1, 0, 1], [0, 1, 1], [1, 1, 2]]), CianiLabel.HYPERELLIPTIC, Fraction(0)),
    )
    for m, label, t in cases:
        result = classify(ab_of(m))
        _require(result.label == label and result.t == t, f"{m}: got {result.label.value}, T = {result.t}")
    return "T = 1, 5, 0"


def _check_hlp_normalization(rng: random.Random, p: int, workers: int) -> str:
    rounds = ROUNDS * 20
    for _ in range(rounds):
        marked = ab_of(random_ciani_matrix(rng))
        hlp = hlp_coefficients(marked)
        _require(hlp_t0(hlp.coefficients, hlp.d_product) == 64 * t_invariant(marked), "T0 != 64 T")
    return f"{rounds} triples"


# ---------------------------------------------------------------------------
# symplectic
# ---------------------------------------------------------------------------

def _check_counts(rng: random.Random, p: int, workers: int) -> str:
    even, odd = enumerate_chars(3)
    _require(len(even) == 36 and len(odd) == 28, f"|S3| = {len(even)}, |U3| = {len(odd)}")
    subspaces = enumerate_max_isotropic(3)
    _require(len(subspaces) == 135 == count_transporter_cosets(3), f"{len(subspaces)} maximal isotropic subspaces")
    return "36 / 28 / 135"


def _check_transporter(rng: random.Random, p: int, workers: int) -> str:
    factorization = transporter_factorization()
    return f"kappa^2(L) = {factorization.kappa_squared_levi}"


def _check_random_words(rng: random.Random, p: int, workers: int) -> str:
    for g in (1, 2, 3):
        for _ in range(ROUNDS):
            m = random_symplectic(rng, g)
            _require(is_symplectic(m.entries), f"word of genus {g} is not symplectic")
            _require((m @ m.inverse()) == SymplecticMatrix.identity(g), "M M^-1 != 1")
    return f"{3 * ROUNDS} words"


def _check_gamma0_decomposition(rng: random.Random, p: int, workers: int) -> str:
    for _ in range(ROUNDS):
        m = random_gamma0_2(rng, 3)
        parts = decompose_gamma0(m)
        _require((parts.gamma @ parts.lower @ parts.levi) == m, "decomposition does not multiply back")
    return f"{ROUNDS} elements"


# ---------------------------------------------------------------------------
# theta
# ---------------------------------------------------------------------------

_G1 = [enumerate_chars(1)[0][k] for k in range(3)]     # [0;0], [0;1], [1;0]


def _check_theta_at_i(rng: random.Random, p: int, workers: int) -> str:
    with mp.workprec(p + GUARD_BITS):
        tau = RiemannMatrix(((mp.mpc(0, 1),),), p)
        value = theta_nulls(_G1[:1], tau)[0]
        expected = mp.pi ** (mp.mpf(1) / 4) / mp.gamma(mp.mpf(3) / 4)
        error = abs(value - expected)
        _require(error < mp.mpf(2) ** (-p + 16), f"theta[0;0](i) off by {_fmt(error)}")
    return f"error {_log2(error)}"


def _check_jacobi(rng: random.Random, p: int, workers: int) -> str:
    worst = mp.mpf(0)
    for _ in range(ROUNDS):
        tau = random_riemann_matrix(rng, 1, p)
        t00, t01, t10 = theta_nulls(_G1, tau)
        with mp.workprec(p + GUARD_BITS):
            lhs, rhs = t00**4, t01**4 + t10**4
            worst = max(worst, abs(lhs - rhs) / abs(lhs))
    _require(worst < mp.mpf(2) ** (-(p // 2)), f"Jacobi residual {_fmt(worst)}")
    return f"max residual {_log2(worst)}"


def _check_odd_vanish(rng: random.Random, p: int, workers: int) -> str:
    tau = random_riemann_matrix(rng, 3, p)
    even, odd = enumerate_chars(3)
    values = theta_nulls(even + odd, tau, workers=workers)
    with mp.workprec(p + GUARD_BITS):
        scale = max(abs(v) for v in values[: len(even)])
        worst = max(abs(v) for v in values[len(even):]) / scale
    _require(worst < mp.mpf(2) ** (-(p // 2)), f"odd theta constant of relative size {_fmt(worst)}")
    return f"largest odd {_log2(worst)}"


def _check_duplication(rng: random.Random, p: int, workers: int) -> str:
    tau = random_riemann_matrix(rng, 2, p)
    worst = mp.mpf(0)
    for eps1, eps2, delta in (((0, 0), (0, 0), (0, 1)), ((1, 0), (0, 0), (0, 1))):
        worst = max(worst, duplication_check(eps1, eps2, delta, tau).residual)
    _require(worst < mp.mpf(2) ** (-(p // 2)), f"duplication residual {_fmt(worst)}")
    return f"max residual {_log2(worst)}"


def _check_chi18_modularity(rng: random.Random, p: int, workers: int) -> str:
    tau = random_riemann_matrix(rng, 3, p)
    m = random_symplectic(rng, 3, length=3)
    weight = chi_weight(3)
    lhs = chi_k(act(m, tau), p, workers)
    with mp.workprec(p + GUARD_BITS):
        rhs = j_factor(m, tau) ** weight * chi_k(tau, p, workers)
        residual = abs(lhs - rhs) / max(abs(lhs), abs(rhs))
    half = chi18_half_modularity(random_gamma0_2(rng, 3, length=3), tau, workers)
    worst = max(residual, half)
    _require(worst < mp.mpf(2) ** (-(p // 2)), f"modularity residual {_fmt(residual)} / {_fmt(half)}")
    return f"max residual {_log2(worst)}"


# ---------------------------------------------------------------------------
# klein
# ---------------------------------------------------------------------------

_SAMPLE_IMAG = ("0.8", "1.1", "1.3")


def _sample_taus(p: int) -> tuple[Any, ...]:
    with mp.workprec(p + GUARD_BITS):
        return tuple(mp.mpc(0, mp.mpf(t)) for t in _SAMPLE_IMAG)


def _check_eighteen(rng: random.Random, p: int, workers: int) -> str:
    report = eighteen_identities(coefficients_from_tau(_sample_taus(p), p=p), workers=workers)
    _require(report.passed(p), f"max residual {_fmt(report.max_residual())}")
    _require(report.c_modulus_residual < mp.mpf(2) ** (-(p // 2)), "|c| != |det Omega2'| / |det Omega2|")
    return f"max residual {_log2(report.max_residual())}"


def _check_main_identity(rng: random.Random, p: int, workers: int) -> str:
    report = verify_main_identity(_sample_taus(p), p, workers=workers)
    _require(report.passed(p), f"residual {_fmt(report.residual)}, closed form {_fmt(report.closed_residual)}")
    return f"residual {_log2(report.residual)}"


def _check_corollary_identity(rng: random.Random, p: int, workers: int) -> str:
    report = verify_klein_corollary(IDENTITY, p, workers)
    _require(report.passed(p), f"coefficients {_fmt(report.coefficient_residual)}, main {_fmt(report.main.residual)}")
    return f"residual {_log2(report.main.residual)}"


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------

SUITES: dict[str, list[tuple[str, CheckFn]]] = {
    "polycore": [
        ("parse_render_round_trip", _check_parse_render),
        ("substitution_keeps_degree", _check_substitution_degree),
        ("euler_identity", _check_euler),
        ("right_action", _check_right_action),
    ],
    "resultant": [
        ("resultant_normalization", _check_resultant_normalization),
        ("fermat_discriminant", _check_fermat),
        ("split_rules_agree", _check_split_rules),
        ("gl3_invariance", _check_gl3_invariance),
    ],
    "ciani": [
        ("closed_discriminant", _check_closed_discriminant),
        ("cofactor_identities", _check_cofactor_identities),
        ("worked_classifications", _check_worked_classifications),
        ("hlp_normalization", _check_hlp_normalization),
    ],
    "symplectic": [
        ("characteristic_counts", _check_counts),
        ("transporter_factorization", _check_transporter),
        ("random_words", _check_random_words),
        ("gamma0_decomposition", _check_gamma0_decomposition),
    ],
    "theta": [
        ("theta_at_i", _check_theta_at_i),
        ("jacobi_quartic", _check_jacobi),
        ("odd_constants_vanish", _check_odd_vanish),
        ("duplication", _check_duplication),
        ("chi18_modularity", _check_chi18_modularity),
    ],
    "klein": [
        ("eighteen_identities", _check_eighteen),
        ("main_identity", _check_main_identity),
        ("corollary_identity", _check_corollary_identity),
    ],
}


def suite_names() -> list[str]:
    return [*SUITES, "all"]


def run_check(name: str, check: CheckFn, rng: random.Random, precision: int, workers: int = 1) -> CheckResult:
    try:
        detail = check(rng, precision, workers)
        return CheckResult(name=name, passed=True, detail=detail)
    except TorelliError as exc:
        return CheckResult(name=name, passed=False, detail=f"[{exc.code}] {exc}")
    except Exception as exc:
        return CheckResult(name=name, passed=False, detail=f"Unexpected: {type(exc).__name__}: {exc}")


def run_suite(name: str, precision: int, seed: int, workers: int = 1) -> SuiteResult:
    if name not in SUITES:
        raise ConfigurationError(f"unknown suite {name!r}; choose from {', '.join(suite_names())}")
    rng = random.Random(f"{seed}/{name}")
    checks: list[CheckResult] = []
    for check_name, check in SUITES[name]:
        print(f"[INFO] {name}.{check_name} ...", file=sys.stderr)
        result = run_check(check_name, check, rng, precision, workers)
        if not result.passed:
            print(f"[WARN] {name}.{check_name} failed: {result.detail}", file=sys.stderr)
        checks.append(result)
    return SuiteResult(name=name, checks=checks)


def run_selftest(suite: str = "all", precision: int = 128, seed: int = 0, workers: int = 1) -> SelftestReport:
    names = list(SUITES) if suite == "all" else [suite]
    suites = [run_suite(name, precision, seed, workers) for name in names]
    return SelftestReport(precision=precision, seed=seed, suites=suites)
