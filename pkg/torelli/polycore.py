"""
Exact homogeneous ternary forms over Q.

A form is a sparse map from exponent triples (a, b, c) of x^a y^b z^c to
Fraction coefficients. Monomials are ordered graded-lex with x > y > z; the
same order indexes the dense bases of V_d used by the resultant module.

Grammar accepted by parse_form:

    expr   := term (("+" | "-") term)*
    term   := factor (("*" | "/") factor)*
    factor := ("+" | "-") factor | power
    power  := atom ("^" INTEGER)?
    atom   := INTEGER | DECIMAL | "x" | "y" | "z" | "(" expr ")"

Division is only allowed by nonzero constants.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from torelli.errors import DegreeMismatchError, FormSyntaxError, InhomogeneousFormError

Exponent = tuple[int, int, int]
Rational = Fraction | int

VARIABLES: tuple[str, str, str] = ("x", "y", "z")
_UNITS: tuple[Exponent, Exponent, Exponent] = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


# ---------------------------------------------------------------------------
# Monomial bases
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def monomials(degree: int) -> tuple[Exponent, ...]:
    """Exponents of V_degree in graded-lex order, x^d first and z^d last."""
    if degree < 0:
        return ()
    return tuple(
        (a, b, degree - a - b)
        for a in range(degree, -1, -1)
        for b in range(degree - a, -1, -1)
    )


@functools.lru_cache(maxsize=None)
def _index_table(degree: int) -> Mapping[Exponent, int]:
    return {exp: i for i, exp in enumerate(monomials(degree))}


def basis_index(exponent: Exponent) -> int:
    return _index_table(sum(exponent))[exponent]


def _as_exponent(exponent: Sequence[int]) -> Exponent:
    if len(exponent) != 3 or any(int(e) != e or e < 0 for e in exponent):
        raise ValueError(f"exponent must be three non-negative integers, got {exponent!r}")
    return (int(exponent[0]), int(exponent[1]), int(exponent[2]))


# ---------------------------------------------------------------------------
# TernaryForm
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TernaryForm:
    """
    Homogeneous form of a fixed degree. The zero form keeps its degree tag so
    that sums and products stay well-typed.

    Terms are canonicalized on construction: zero coefficients dropped,
    remaining keys sorted graded-lex.
    """
    degree: int
    terms: Mapping[Exponent, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.degree < 0:
            raise ValueError(f"degree must be non-negative, got {self.degree}")
        clean: dict[Exponent, Fraction] = {}
        off_degree: set[int] = set()
        for raw_exp, coeff in self.terms.items():
            exp = _as_exponent(raw_exp)
            value = Fraction(coeff)
            if value == 0:
                continue
            if sum(exp) != self.degree:
                off_degree.add(sum(exp))
                continue
            clean[exp] = clean.get(exp, Fraction(0)) + value
        if off_degree:
            raise InhomogeneousFormError(
                f"terms of degree {sorted(off_degree)} in a form of degree {self.degree}",
                off_degree | {self.degree},
            )
        ordered = {exp: clean[exp] for exp in sorted(clean, reverse=True) if clean[exp] != 0}
        object.__setattr__(self, "terms", ordered)

    def __hash__(self) -> int:
        return hash((self.degree, tuple(self.terms.items())))

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, degree: int) -> TernaryForm:
        return cls(degree, {})

    @classmethod
    def monomial(cls, exponent: Sequence[int], coefficient: Rational = 1) -> TernaryForm:
        exp = _as_exponent(exponent)
        return cls(sum(exp), {exp: Fraction(coefficient)})

    @classmethod
    def from_dense(cls, degree: int, coefficients: Sequence[Rational]) -> TernaryForm:
        basis = monomials(degree)
        if len(coefficients) != len(basis):
            raise DegreeMismatchError(
                f"V_{degree} has dimension {len(basis)}, got {len(coefficients)} coefficients"
            )
        return cls(degree, dict(zip(basis, (Fraction(c) for c in coefficients))))

    # -- accessors -----------------------------------------------------------

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self.terms.get(_as_exponent(exponent), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def dense(self) -> list[Fraction]:
        """Coefficient vector in the graded-lex basis of V_degree."""
        return [self.terms.get(exp, Fraction(0)) for exp in monomials(self.degree)]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: TernaryForm) -> TernaryForm:
        return add(self, other)

    def __sub__(self, other: TernaryForm) -> TernaryForm:
        return add(self, -other)

    def __neg__(self) -> TernaryForm:
        return self.scale(-1)

    def __mul__(self, other: TernaryForm | Rational) -> TernaryForm:
        if isinstance(other, TernaryForm):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other: Rational) -> TernaryForm:
        return self.scale(other)

    def scale(self, factor: Rational) -> TernaryForm:
        factor = Fraction(factor)
        return TernaryForm(self.degree, {e: c * factor for e, c in self.terms.items()})

    def __str__(self) -> str:
        return render(self)


def add(f: TernaryForm, g: TernaryForm) -> TernaryForm:
    if f.degree != g.degree:
        raise DegreeMismatchError(f"cannot add forms of degree {f.degree} and {g.degree}")
    out = dict(f.terms)
    for exp, coeff in g.terms.items():
        out[exp] = out.get(exp, Fraction(0)) + coeff
    return TernaryForm(f.degree, out)


def mul(f: TernaryForm, g: TernaryForm) -> TernaryForm:
    out: dict[Exponent, Fraction] = {}
    for (a1, b1, c1), u in f.terms.items():
        for (a2, b2, c2), v in g.terms.items():
            key = (a1 + a2, b1 + b2, c1 + c2)
            out[key] = out.get(key, Fraction(0)) + u * v
    return TernaryForm(f.degree + g.degree, out)


def power(f: TernaryForm, n: int) -> TernaryForm:
    if n < 0:
        raise ValueError(f"exponent must be non-negative, got {n}")
    result = TernaryForm.monomial((0, 0, 0))
    for _ in range(n):
        result = mul(result, f)
    return result


def partial_derivative(f: TernaryForm, axis: int) -> TernaryForm:
    """d f / d x_axis for axis in {1, 2, 3}; a constant differentiates to the zero constant."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    if f.degree == 0:
        return TernaryForm.zero(0)
    k = axis - 1
    out: dict[Exponent, Fraction] = {}
    for exp, coeff in f.terms.items():
        if exp[k] == 0:
            continue
        lowered = list(exp)
        lowered[k] -= 1
        out[tuple(lowered)] = coeff * exp[k]
    return TernaryForm(f.degree - 1, out)


def substitute_linear(f: TernaryForm, g: Sequence[Sequence[Rational]]) -> TernaryForm:
    """
    Right action (f.g)(X) = f(gX): x_i is replaced by sum_j g[i][j] x_j.

    g may be singular; the result is then simply the composed form.
    """
    if len(g) != 3 or any(len(row) != 3 for row in g):
        raise ValueError("substitution matrix must be 3x3")
    images = [
        TernaryForm(1, {_UNITS[j]: Fraction(g[i][j]) for j in range(3)})
        for i in range(3)
    ]
    powers: list[list[TernaryForm]] = [[TernaryForm.monomial((0, 0, 0))] for _ in range(3)]
    result = TernaryForm.zero(f.degree)
    for exp, coeff in f.terms.items():
        term = TernaryForm.monomial((0, 0, 0), coeff)
        for i, e in enumerate(exp):
            while len(powers[i]) <= e:
                powers[i].append(mul(powers[i][-1], images[i]))
            term = mul(term, powers[i][e])
        result = add(result, term)
    return result


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def _render_monomial(exp: Exponent) -> str:
    parts = []
    for name, e in zip(VARIABLES, exp):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def render(f: TernaryForm) -> str:
    """Canonical text, graded-lex; parse_form(render(f)) == f for nonzero f."""
    if f.is_zero():
        return "0"
    chunks: list[str] = []
    for i, (exp, coeff) in enumerate(f.terms.items()):
        sign = "-" if coeff < 0 else "+"
        magnitude = abs(coeff)
        mono = _render_monomial(exp)
        if magnitude.denominator == 1:
            num = str(magnitude.numerator)
        else:
            num = f"({magnitude.numerator}/{magnitude.denominator})"
        if not mono:
            body = num
        elif magnitude == 1:
            body = mono
        else:
            body = f"{num}*{mono}"
        if i == 0:
            chunks.append(body if sign == "+" else f"-{body}")
        else:
            chunks.append(f" {sign} {body}")
    return "".join(chunks)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

_Poly = dict[Exponent, Fraction]


@dataclass
class _Token:
    kind: str   # "num", "var", "op", "end"
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch.isdigit() or ch == ".":
            start = i
            while i < len(text) and (text[i].isdigit() or text[i] == "."):
                i += 1
            literal = text[start:i]
            if literal.count(".") > 1 or literal == ".":
                raise FormSyntaxError(f"malformed number {literal!r}", start)
            tokens.append(_Token("num", literal, start))
        elif ch in VARIABLES:
            tokens.append(_Token("var", ch, i))
            i += 1
        elif ch in "+-*/^()":
            tokens.append(_Token("op", ch, i))
            i += 1
        else:
            raise FormSyntaxError(f"unexpected character {ch!r}", i)
    tokens.append(_Token("end", "", len(text)))
    return tokens


def _padd(p: _Poly, q: _Poly, sign: int = 1) -> _Poly:
    out = dict(p)
    for exp, c in q.items():
        out[exp] = out.get(exp, Fraction(0)) + sign * c
    return {e: c for e, c in out.items() if c != 0}


def _pmul(p: _Poly, q: _Poly) -> _Poly:
    out: _Poly = {}
    for (a1, b1, c1), u in p.items():
        for (a2, b2, c2), v in q.items():
            key = (a1 + a2, b1 + b2, c1 + c2)
            out[key] = out.get(key, Fraction(0)) + u * v
    return {e: c for e, c in out.items() if c != 0}


class _Parser:
    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.pos]

    def _advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _accept(self, op: str) -> bool:
        if self.current.kind == "op" and self.current.text == op:
            self.pos += 1
            return True
        return False

    def parse(self) -> _Poly:
        if self.current.kind == "end":
            raise FormSyntaxError("empty expression", 0)
        poly = self._expr()
        if self.current.kind != "end":
            raise FormSyntaxError(f"unexpected token {self.current.text!r}", self.current.position)
        return poly

    def _expr(self) -> _Poly:
        poly = self._term()
        while True:
            if self._accept("+"):
                poly = _padd(poly, self._term())
            elif self._accept("-"):
                poly = _padd(poly, self._term(), sign=-1)
            else:
                return poly

    def _term(self) -> _Poly:
        poly = self._factor()
        while True:
            if self._accept("*"):
                poly = _pmul(poly, self._factor())
            elif self.current.kind == "op" and self.current.text == "/":
                slash = self._advance()
                divisor = self._factor()
                if any(exp != (0, 0, 0) for exp in divisor):
                    raise FormSyntaxError("division by a non-constant expression", slash.position)
                constant = divisor.get((0, 0, 0), Fraction(0))
                if constant == 0:
                    raise FormSyntaxError("division by zero", slash.position)
                poly = {e: c / constant for e, c in poly.items()}
            else:
                return poly

    def _factor(self) -> _Poly:
        if self._accept("+"):
            return self._factor()
        if self._accept("-"):
            return {e: -c for e, c in self._factor().items()}
        return self._power()

    def _power(self) -> _Poly:
        base = self._atom()
        if self.current.kind == "op" and self.current.text == "^":
            caret = self._advance()
            tok = self._advance()
            if tok.kind != "num" or not tok.text.isdigit():
                raise FormSyntaxError("exponent must be a non-negative integer", caret.position)
            result: _Poly = {(0, 0, 0): Fraction(1)}
            for _ in range(int(tok.text)):
                result = _pmul(result, base)
            return result
        return base

    def _atom(self) -> _Poly:
        tok = self._advance()
        if tok.kind == "num":
            value = Fraction(tok.text)
            return {(0, 0, 0): value} if value else {}
        if tok.kind == "var":
            return {_UNITS[VARIABLES.index(tok.text)]: Fraction(1)}
        if tok.kind == "op" and tok.text == "(":
            inner = self._expr()
            if not self._accept(")"):
                raise FormSyntaxError("missing closing parenthesis", self.current.position)
            return inner
        if tok.kind == "end":
            raise FormSyntaxError("unexpected end of input", tok.position)
        raise FormSyntaxError(f"unexpected token {tok.text!r}", tok.position)


def parse_form(text: str, degree: int | None = None) -> TernaryForm:
    """
    Parse a polynomial in x, y, z with rational coefficients.

    The result must be homogeneous. When `degree` is given the form must have
    that degree (the zero polynomial takes the requested degree).
    """
    poly = _Parser(text).parse()
    degrees = {sum(exp) for exp in poly}
    if len(degrees) > 1:
        raise InhomogeneousFormError(
            f"form is not homogeneous: found degrees {sorted(degrees)}", degrees
        )
    found = degrees.pop() if degrees else (degree if degree is not None else 0)
    if degree is not None and found != degree:
        raise DegreeMismatchError(f"expected a form of degree {degree}, got degree {found}")
    return TernaryForm(found, poly)
