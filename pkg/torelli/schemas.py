from fractions import Fraction
from typing import Any, Literal

from mpmath import mp
from pydantic import BaseModel, field_validator, model_validator

from torelli.ciani import CianiMatrix
from torelli.polycore import TernaryForm
from torelli.symplectic import SymplecticMatrix
from torelli.theta import GUARD_BITS, RiemannMatrix


def parse_rational(text: str | int) -> Fraction:
    """'3', '-3/4' or '0.25' as an exact rational."""
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc


def fmt_rational(q: Fraction | int) -> str:
    return str(Fraction(q))


def digits_for(precision: int) -> int:
    """Decimal digits carried by a binary precision."""
    return max(1, int(precision * 0.30103))


class ComplexValue(BaseModel):
    re: str
    im: str

    @classmethod
    def of(cls, z: Any, precision: int) -> "ComplexValue":
        n = digits_for(precision)
        with mp.workprec(precision + GUARD_BITS):
            z = mp.mpc(z)
            return cls(re=mp.nstr(z.real, n), im=mp.nstr(z.imag, n))


def fmt_real(x: Any, digits: int = 6) -> str:
    return mp.nstr(x, digits)


# ---------------------------------------------------------------------------
# Input payloads
# ---------------------------------------------------------------------------

class FormTerm(BaseModel):
    exp: list[int]
    num: str
    den: str = "1"

    @field_validator("exp")
    @classmethod
    def validate_exp(cls, v: list[int]) -> list[int]:
        if len(v) != 3 or min(v) < 0:
            raise ValueError(f"exponent must be three non-negative integers, got {v}")
        return v

    @model_validator(mode="after")
    def validate_coefficient(self) -> "FormTerm":
        try:
            int(self.num)
            den = int(self.den)
        except ValueError as exc:
            raise ValueError(f"num and den must be integer strings: {exc}") from exc
        if den == 0:
            raise ValueError("den must be nonzero")
        return self

    @property
    def coefficient(self) -> Fraction:
        return Fraction(int(self.num), int(self.den))


class FormPayload(BaseModel):
    """{"degree": d, "terms": [{"exp": [i, j, k], "num": "...", "den": "..."}]}"""
    degree: int
    terms: list[FormTerm]

    @model_validator(mode="after")
    def validate_degrees(self) -> "FormPayload":
        if self.degree < 0:
            raise ValueError(f"degree must be non-negative, got {self.degree}")
        for term in self.terms:
            if sum(term.exp) != self.degree:
                raise ValueError(f"term {term.exp} has degree {sum(term.exp)}, expected {self.degree}")
        return self

    def to_form(self) -> TernaryForm:
        terms: dict[tuple[int, int, int], Fraction] = {}
        for term in self.terms:
            key = tuple(term.exp)
            terms[key] = terms.get(key, Fraction(0)) + term.coefficient
        return TernaryForm(self.degree, terms)

    @classmethod
    def from_form(cls, f: TernaryForm) -> "FormPayload":
        return cls(
            degree=f.degree,
            terms=[
                FormTerm(exp=list(exp), num=str(c.numerator), den=str(c.denominator))
                for exp, c in f.terms.items()
            ],
        )


class MatrixPayload(BaseModel):
    """Ciani matrix {"a": [a1, a2, a3], "b": [b1, b2, b3]} with rational strings."""
    a: list[str]
    b: list[str]

    @field_validator("a", "b", mode="before")
    @classmethod
    def validate_triple(cls, v: Any) -> list[str]:
        if not isinstance(v, list) or len(v) != 3:
            raise ValueError("expected a list of three rationals")
        out = [str(x) for x in v]
        for x in out:
            parse_rational(x)
        return out

    def to_matrix(self) -> CianiMatrix:
        return CianiMatrix(
            a=tuple(parse_rational(x) for x in self.a),
            b=tuple(parse_rational(x) for x in self.b),
        )

    @classmethod
    def from_matrix(cls, m: CianiMatrix) -> "MatrixPayload":
        return cls(a=[fmt_rational(v) for v in m.a], b=[fmt_rational(v) for v in m.b])


class IntegerMatrixPayload(BaseModel):
    """{"matrix": [[...], ...]}, a 2g x 2g integer matrix."""
    matrix: list[list[int]]

    @model_validator(mode="after")
    def validate_shape(self) -> "IntegerMatrixPayload":
        n = len(self.matrix)
        if n == 0 or n % 2 or any(len(row) != n for row in self.matrix):
            raise ValueError(f"matrix must be 2g x 2g, got {n} rows")
        return self

    def to_symplectic(self) -> SymplecticMatrix:
        return SymplecticMatrix(tuple(tuple(row) for row in self.matrix))


class TauPayload(BaseModel):
    """{"g": 3, "re": [[...]], "im": [[...]], "prec": 256} with decimal-string entries."""
    g: int
    re: list[list[str]]
    im: list[list[str]]
    prec: int | None = None

    @model_validator(mode="after")
    def validate_shape(self) -> "TauPayload":
        for name, rows in (("re", self.re), ("im", self.im)):
            if len(rows) != self.g or any(len(row) != self.g for row in rows):
                raise ValueError(f"'{name}' must be a {self.g} x {self.g} matrix")
            for row in rows:
                for entry in row:
                    try:
                        mp.mpf(entry)
                    except (ValueError, TypeError) as exc:
                        raise ValueError(f"'{name}' entry {entry!r} is not a decimal number") from exc
        return self

    def to_riemann(self, precision: int | None = None) -> RiemannMatrix:
        return RiemannMatrix.from_strings(self.re, self.im, precision or self.prec or 256)


# ---------------------------------------------------------------------------
# Reports (every number is a string)
# ---------------------------------------------------------------------------

class DiscReport(BaseModel):
    form: str
    rule: Literal["greedy", "reverse"]
    discriminant: str


class ClassifyReport(BaseModel):
    matrix: MatrixPayload
    label: str
    T: str
    square: bool
    twist_d: str | None = None
    X: str
    D: str


class ThetaReport(BaseModel):
    characteristic: str
    parity: Literal["even", "odd"]
    precision: int
    value: ComplexValue


class ChiReport(BaseModel):
    kind: Literal["chi18", "chi_k", "sigma140"]
    g: int
    weight: int | None = None
    precision: int
    value: ComplexValue


class IgusaReport(BaseModel):
    label: str
    precision: int
    chi18_abs: str
    sigma140_abs: str
    zero_count: int
    band_count: int
    smallest_magnitudes: list[str]


class IsotropicReport(BaseModel):
    g: int
    count: int
    subspaces: list[list[list[int]]]


class SymplecticReport(BaseModel):
    g: int
    membership: dict[str, bool]
    kappa_squared: int | None = None     # det D, on P(Z)


class KleinReport(BaseModel):
    taus: list[ComplexValue]
    precision: int
    residual_main: str
    closed_residual: str
    degenerate: bool
    lhs: ComplexValue
    rhs: ComplexValue
    det_m: ComplexValue
    c: ComplexValue
    fitted_from: int
    residuals_18: list[str]
    c_modulus_residual: str
    classification: str
    passed: bool
    timings: dict[str, str] | None = None


class KleinCorollaryReport(BaseModel):
    matrix: MatrixPayload
    cofactor: MatrixPayload
    precision: int
    D: str
    X: str
    discriminant: str
    taus: list[ComplexValue]
    shifted: bool
    coefficient_residual: str
    residual_main: str
    lhs: ComplexValue
    passed: bool
    timings: dict[str, str] | None = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    detail: str = ""


class SuiteResult(BaseModel):
    name: str
    checks: list[CheckResult]
    passed: int = 0
    failed: int = 0

    @model_validator(mode="after")
    def count_checks(self) -> "SuiteResult":
        self.passed = sum(1 for c in self.checks if c.passed)
        self.failed = len(self.checks) - self.passed
        return self


class SelftestReport(BaseModel):
    precision: int
    seed: int
    suites: list[SuiteResult]
    ok: bool = False

    @model_validator(mode="after")
    def summarize(self) -> "SelftestReport":
        self.ok = all(s.failed == 0 for s in self.suites)
        return self
