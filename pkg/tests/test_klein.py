"""
Tests for klein.py: uniformized Ciani matrices, the quotient by W and the
discriminant identity.

Covers test matrix items:
- 31: delta_i = a_j a_k and rho identities hold on every uniformized triple
- 32: closed forms of det m and X agree with direct evaluation
- 33: W characteristics, the eighteen identity pairs and Omega'
- 34: eighteen identities at 256 bits and the main identity at (0.8i, 1.1i, 1.3i),
  on the 27-point imaginary grid and on 10 seeded complex triples (slow)
- 35: AGM periods of y^2 = x(x^2 - 4bx - 4c), including the root placement
- 36: corollary for the identity matrix and 5 seeded random matrices (slow)
- 37: hyperelliptic point on (i, i, it), its quotient classified hyperelliptic at
  256 bits, and the degeneration profile
- 38: DegenerateLatticeError / UnsupportedConfigurationError / NotInCianiDomainError
- 56: chi18(Omega') does not depend on the transporter lift (slow)
"""
import itertools
from fractions import Fraction

import pytest
from mpmath import mp

from torelli.ciani import IDENTITY, W_PATTERN, CianiMatrix, random_ciani_matrix
from torelli.errors import (
    DegenerateLatticeError,
    InvalidMarkedTripleError,
    NotInCianiDomainError,
    UnsupportedConfigurationError,
)
from torelli.klein import (
    IDENTITY_PAIRS,
    coefficients_from_tau,
    degeneration_profile,
    det_m_closed,
    eighteen_identities,
    elliptic_periods,
    hyperelliptic_point,
    omega_prime,
    verify_grid,
    verify_klein_corollary,
    verify_main_identity,
    w_characteristics,
    x_closed,
)
from torelli.symplectic import transporter_lift, w_subspace, w_transporter
from torelli.theta import GUARD_BITS, IgusaLabel, enumerate_chars, igusa_classify, random_riemann_matrix
from tests.conftest import imaginary_taus, tolerance

SAMPLE = ("0.8", "1.1", "1.3")


def _relative(lhs, rhs):
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs))


class TestUniformizedTriple:
    def test_symmetric_taus_give_equal_entries(self):
        u = coefficients_from_tau(imaginary_taus("1", "1", "1"), p=128)
        with mp.workprec(128 + GUARD_BITS):
            assert _relative(u.a[0], u.a[1]) < tolerance(128)
            assert _relative(u.b[1], u.b[2]) < tolerance(128)

    def test_rows_are_symmetric(self):
        rows = coefficients_from_tau(imaginary_taus(*SAMPLE), p=128).rows()
        assert all(rows[i][j] == rows[j][i] for i in range(3) for j in range(3))

    def test_entries_are_negative_on_the_imaginary_axis(self):
        u = coefficients_from_tau(imaginary_taus(*SAMPLE), p=128)
        assert all(mp.re(v) < 0 for v in u.a + u.b + u.c)

    def test_closed_determinant(self):
        u = coefficients_from_tau(imaginary_taus(*SAMPLE), p=128)
        with mp.workprec(128 + GUARD_BITS):
            assert _relative(det_m_closed(u), u.det_m()) < tolerance(128)

    def test_closed_x(self):
        u = coefficients_from_tau(imaginary_taus(*SAMPLE), omega2=(1, 2, mp.mpf("0.5")), p=128)
        with mp.workprec(128 + GUARD_BITS):
            assert _relative(x_closed(u), u.x_direct()) < tolerance(128)

    def test_needs_three_taus(self):
        with pytest.raises(ValueError):
            coefficients_from_tau(imaginary_taus("1", "1"), p=128)

    def test_vanishing_theta_rejected(self):
        with pytest.raises(DegenerateLatticeError):
            coefficients_from_tau(imaginary_taus("1", "1", "100"), p=128)


class TestWQuotient:
    def test_w_characteristics(self):
        w = w_characteristics()
        assert len(w.elements) == 8
        assert set(w.labels) == set(W_PATTERN)
        assert str(w.elements[0]) == "[000;000]"

    def test_identity_pairs_cover_even_characteristics(self):
        chars = [ch for pair in IDENTITY_PAIRS for ch in pair]
        assert len(IDENTITY_PAIRS) == 18
        assert set(chars) == set(enumerate_chars(3)[0])
        assert len(set(chars)) == 36

    def test_omega_prime_is_half_the_transported_tau(self):
        quotient = omega_prime(coefficients_from_tau(imaginary_taus(*SAMPLE), p=128))
        assert quotient.tau_residual < tolerance(128)
        assert quotient.tau.g == 3


@pytest.mark.slow
class TestIdentities:
    def test_eighteen_identities(self):
        report = eighteen_identities(coefficients_from_tau(imaginary_taus(*SAMPLE, p=256), p=256))
        assert report.fitted_from == 1
        assert report.passed(256), mp.nstr(report.max_residual(), 5)

    def test_main_identity(self):
        report = verify_main_identity(imaginary_taus(*SAMPLE), 128)
        assert not report.degenerate
        assert report.passed(128), mp.nstr(report.residual, 5)
        assert set(report.timings) == {"uniformize", "chi18"}

    def test_main_identity_with_scaled_lattices(self):
        report = verify_main_identity(imaginary_taus(*SAMPLE), 128, omega2=(2, 1, 3))
        assert report.passed(128)

    def test_main_identity_on_complex_triples(self, rng):
        for _ in range(10):
            taus = tuple(random_riemann_matrix(rng, 1, 128).tau[0][0] for _ in range(3))
            report = verify_main_identity(taus, 128)
            assert report.passed(128), mp.nstr(report.residual, 5)

    def test_lift_independence(self):
        lifts = [
            transporter_lift(w_subspace(), "first"),
            transporter_lift(w_subspace(), "last"),
            w_transporter(),
        ]
        values = [verify_main_identity(imaginary_taus(*SAMPLE), 128, n=n).lhs for n in lifts]
        with mp.workprec(128 + GUARD_BITS):
            assert _relative(values[0], values[1]) < tolerance(128)
            assert _relative(values[0], values[2]) < tolerance(128)

    def test_grid_keeps_input_order(self):
        triples = [imaginary_taus("1", "1.1", "1.2"), imaginary_taus(*SAMPLE)]
        reports = verify_grid(triples, p=96, workers=2)
        assert [r.taus for r in reports] == [tuple(t) for t in triples]
        assert all(r.passed(96) for r in reports)

    def test_imaginary_grid(self):
        triples = [imaginary_taus(*point) for point in itertools.product(("0.7", "1.0", "1.4"), repeat=3)]
        reports = verify_grid(triples, p=128, workers=4)
        assert len(reports) == 27
        failed = [r.taus for r in reports if not r.passed(128)]
        assert not failed, failed

    def test_corollary_for_identity(self):
        report = verify_klein_corollary(IDENTITY, p=128)
        assert report.d_value == 1 and report.x_value == 1
        assert report.discriminant == 2**54
        assert report.passed(128)

    def test_corollary_for_random_matrices(self, rng):
        for _ in range(5):
            m = random_ciani_matrix(rng, same_sign_c=True)
            report = verify_klein_corollary(m, p=128)
            assert report.x_value == report.d_value**2
            assert report.discriminant == 2**54 * report.d_value
            assert report.passed(128), str(m)


class TestEllipticPeriods:
    def test_square_lattice_curve(self):
        # y^2 = x^3 - 4x: roots 2, 0, -2
        periods = elliptic_periods(0, 1, p=128)
        assert periods.zero_root == "e2"
        with mp.workprec(128 + GUARD_BITS):
            assert abs(periods.tau - mp.mpc(0.5, 0.5)) < tolerance(128)
        assert periods.residual < tolerance(128)

    @pytest.mark.parametrize(
        "b, c, zero_root",
        [(1, Fraction(-3, 4), "e3"), (-1, Fraction(-3, 4), "e1"), (Fraction(1, 2), 2, "e2")],
    )
    def test_zero_root_placement(self, b, c, zero_root):
        periods = elliptic_periods(b, c, p=96)
        assert periods.zero_root == zero_root
        assert periods.tau.imag > 0

    def test_singular_curve(self):
        with pytest.raises(InvalidMarkedTripleError):
            elliptic_periods(1, 0)

    def test_complex_two_torsion_unsupported(self):
        with pytest.raises(UnsupportedConfigurationError):
            elliptic_periods(0, -1)


class TestCorollaryDomain:
    def test_singular_matrix_rejected(self):
        with pytest.raises(NotInCianiDomainError):
            verify_klein_corollary(CianiMatrix.from_rows([[1, 0, 1], [0, 1, 1], [1, 1, 2]]))


class TestHyperellipticLocus:
    def test_root_on_i_i_it(self):
        # det m changes sign where the modulus of E3 is 1/3
        point = hyperelliptic_point(p=96)
        assert 1.4 < float(point.t) < 1.7
        assert abs(point.det_m) < mp.mpf(2) ** (-40)

    def test_unbracketed_root(self):
        with pytest.raises(UnsupportedConfigurationError):
            hyperelliptic_point(bracket=(2.0, 3.0), p=64)

    @pytest.mark.slow
    def test_profile_ratio_tends_to_one(self):
        point = hyperelliptic_point(p=96)
        profile = degeneration_profile(point, ["0.1", "0.01"], p=96)
        assert [float(q.offset) for q in profile] == [0.1, 0.01]
        for q in profile:
            assert abs(q.ratio - 1) < tolerance(96)

    @pytest.mark.slow
    def test_quotient_is_hyperelliptic_at_256_bits(self):
        point = hyperelliptic_point(p=256)
        assert abs(point.det_m) < mp.mpf(2) ** (-100)
        quotient = omega_prime(coefficients_from_tau(point.taus, p=256))
        result = igusa_classify(quotient.tau)
        assert result.label is IgusaLabel.HYPERELLIPTIC
        assert result.zero_count == 1
        assert abs(result.sigma140) > mp.mpf(2) ** (-100)
