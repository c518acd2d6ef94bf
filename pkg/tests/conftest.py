"""
Shared test infrastructure.

Seeded generators: rng fixture plus Ciani matrices, symplectic words and
    Riemann matrices drawn from it.
load_fixture(): reads a file from tests/fixtures/.
fixture_path(): absolute path of a fixture file, for CLI arguments.
Tolerances: tolerance(p) = 2^(-p/2), the acceptance level used by the
    numerical identity checks.
"""
import random
from pathlib import Path

import pytest
from mpmath import mp

from torelli.ciani import CianiMatrix, random_ciani_matrix
from torelli.theta import GUARD_BITS, RiemannMatrix, random_riemann_matrix

FIXTURES_DIR = Path(__file__).parent / "fixtures"

SEED = 20240229


def load_fixture(filename: str) -> str:
    return (FIXTURES_DIR / filename).read_text(encoding="utf-8")


def fixture_path(filename: str) -> str:
    return str(FIXTURES_DIR / filename)


def tolerance(p: int):
    return mp.mpf(2) ** (-(p // 2))


def imaginary_taus(*values: str, p: int = 128) -> tuple:
    """('0.8', '1.1') -> (0.8i, 1.1i) at precision p."""
    with mp.workprec(p + GUARD_BITS):
        return tuple(mp.mpc(0, mp.mpf(v)) for v in values)


# ---------------------------------------------------------------------------
# Pytest fixtures
# ---------------------------------------------------------------------------

@pytest.fixture
def rng() -> random.Random:
    return random.Random(SEED)


@pytest.fixture
def ciani_matrices(rng: random.Random) -> list[CianiMatrix]:
    """100 seeded elements of S with det m != 0."""
    return [random_ciani_matrix(rng) for _ in range(100)]


@pytest.fixture
def riemann_g3(rng: random.Random) -> RiemannMatrix:
    return random_riemann_matrix(rng, 3, 128)


@pytest.fixture
def tau_i() -> RiemannMatrix:
    """tau = i in genus 1 at 256 bits."""
    return RiemannMatrix.diagonal([mp.mpc(0, 1)], 256)
