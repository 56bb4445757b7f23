"""Exterior calculus on the two-dimensional (p, V) manifold.

Coefficient functions are finite sums of Laurent monomials

    c * nR^a * c_v^b * p^alpha * V^beta

with exact rational ``c``.  Division is expressed through negative exponents,
so the algebra is closed under +, -, * and division by monomials.  A 1-form is
``A dp + B dV``, a 2-form is ``C dp^dV``, and the exterior derivative maps

    d(g)          = dg/dp dp + dg/dV dV
    d(A dp + B dV) = (dB/dp - dA/dV) dp^dV

Potentials extend scalar fields with ``ln p`` and ``ln V`` terms, which is
what antidifferentiating ``p^-1`` or ``V^-1`` requires.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import FormSyntaxError, NotClosed, NotIntegrable

__all__ = [
    "Monomial",
    "ScalarField",
    "OneForm",
    "TwoForm",
    "Potential",
    "mono",
    "ZERO",
    "ONE",
    "d_scalar",
    "d_one",
    "is_closed",
    "find_potential",
    "normalize",
    "parse_field",
    "parse_oneform",
]

Rational = Union[int, Fraction]

# Exponent key order used for canonical sorting: (p, V, nR, c_v).
Key = tuple[int, int, int, int]


@dataclass(frozen=True)
class Monomial:
    coeff: Fraction
    nR_pow: int = 0
    cv_pow: int = 0
    p_pow: int = 0
    V_pow: int = 0

    @property
    def key(self) -> Key:
        return (self.p_pow, self.V_pow, self.nR_pow, self.cv_pow)

    @classmethod
    def from_key(cls, key: Key, coeff: Rational) -> Monomial:
        p, V, nR, cv = key
        return cls(Fraction(coeff), nR, cv, p, V)

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(
            self.coeff * other.coeff,
            self.nR_pow + other.nR_pow,
            self.cv_pow + other.cv_pow,
            self.p_pow + other.p_pow,
            self.V_pow + other.V_pow,
        )

    def render(self, with_sign: bool = True) -> str:
        c = self.coeff if with_sign else abs(self.coeff)
        atoms = []
        for name, k in (("nR", self.nR_pow), ("c_v", self.cv_pow), ("p", self.p_pow), ("V", self.V_pow)):
            if k == 1:
                atoms.append(name)
            elif k != 0:
                atoms.append(f"{name}^{k}")
        if not atoms:
            return _render_rational(c)
        if c == 1:
            return "*".join(atoms)
        if c == -1:
            return "-" + "*".join(atoms)
        return "*".join([_render_rational(c)] + atoms)


def _render_rational(c: Fraction) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"({c.numerator}/{c.denominator})"


class ScalarField:
    """Finite sum of Laurent monomials in canonical form.

    Like terms are merged and zero terms dropped on construction, and terms are
    kept sorted by (p, V, nR, c_v) exponents, so ``==`` is structural equality of
    the canonical forms.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Iterable[Monomial] = ()):
        acc: dict[Key, Fraction] = {}
        for m in terms:
            acc[m.key] = acc.get(m.key, Fraction(0)) + Fraction(m.coeff)
        self._terms = tuple(
            Monomial.from_key(k, c) for k, c in sorted(acc.items()) if c != 0
        )
        self._hash = None

    @classmethod
    def from_mapping(cls, mapping: Mapping[Key, Rational]) -> ScalarField:
        return cls(Monomial.from_key(k, c) for k, c in mapping.items())

    @classmethod
    def const(cls, c: Rational) -> ScalarField:
        return cls([Monomial(Fraction(c))])

    @property
    def terms(self) -> tuple[Monomial, ...]:
        return self._terms

    def __iter__(self) -> Iterator[Monomial]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ScalarField.const(other)
        if not isinstance(other, ScalarField):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __repr__(self) -> str:
        return f"ScalarField({self.render()!r})"

    def __add__(self, other: ScalarField | Rational) -> ScalarField:
        other = _as_field(other)
        if other is NotImplemented:
            return NotImplemented
        return ScalarField(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> ScalarField:
        return ScalarField(Monomial(-m.coeff, m.nR_pow, m.cv_pow, m.p_pow, m.V_pow) for m in self._terms)

    def __sub__(self, other: ScalarField | Rational) -> ScalarField:
        other = _as_field(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Rational) -> ScalarField:
        return _as_field(other) - self

    def __mul__(self, other: ScalarField | Rational) -> ScalarField:
        other = _as_field(other)
        if other is NotImplemented:
            return NotImplemented
        return ScalarField(a * b for a in self._terms for b in other._terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> ScalarField:
        if k >= 0:
            out = ONE
            for _ in range(k):
                out = out * self
            return out
        if len(self._terms) != 1:
            raise ValueError("negative powers are defined only for single monomials")
        (m,) = self._terms
        return ScalarField(
            [Monomial(1 / m.coeff ** -k, m.nR_pow * k, m.cv_pow * k, m.p_pow * k, m.V_pow * k)]
        )

    def diff_p(self) -> ScalarField:
        return ScalarField(
            Monomial(m.coeff * m.p_pow, m.nR_pow, m.cv_pow, m.p_pow - 1, m.V_pow)
            for m in self._terms
            if m.p_pow != 0
        )

    def diff_V(self) -> ScalarField:
        return ScalarField(
            Monomial(m.coeff * m.V_pow, m.nR_pow, m.cv_pow, m.p_pow, m.V_pow - 1)
            for m in self._terms
            if m.V_pow != 0
        )

    def depends_on_state(self) -> bool:
        """True if any term carries a nonzero power of p or V."""
        return any(m.p_pow or m.V_pow for m in self._terms)

    def evaluate(self, p: float, V: float, nR: float = 1.0, cv: float = 1.0) -> float:
        return sum(
            float(m.coeff) * nR**m.nR_pow * cv**m.cv_pow * p**m.p_pow * V**m.V_pow
            for m in self._terms
        )

    def compile(self, nR: float, cv: float) -> Callable[[float, float], float]:
        """Return ``f(p, V)`` with the constants folded into float coefficients."""
        folded = [
            (float(m.coeff) * nR**m.nR_pow * cv**m.cv_pow, m.p_pow, m.V_pow)
            for m in self._terms
        ]
        if not folded:
            return lambda p, V: 0.0

        def f(p: float, V: float) -> float:
            total = 0.0
            for c, a, b in folded:
                total += c * p**a * V**b
            return total

        return f

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts = [self._terms[0].render()]
        for m in self._terms[1:]:
            sign = " - " if m.coeff < 0 else " + "
            parts.append(sign + m.render(with_sign=False))
        return "".join(parts)

    def __str__(self) -> str:
        return self.render()


def _as_field(x):
    if isinstance(x, ScalarField):
        return x
    if isinstance(x, (int, Fraction)):
        return ScalarField.const(x)
    return NotImplemented


def mono(c: Rational = 1, *, p: int = 0, V: int = 0, nR: int = 0, cv: int = 0) -> ScalarField:
    """Single-term field ``c * nR^nR * c_v^cv * p^p * V^V``."""
    return ScalarField([Monomial(Fraction(c), nR, cv, p, V)])


ZERO = ScalarField()
ONE = ScalarField.const(1)


def normalize(f: ScalarField) -> ScalarField:
    return ScalarField(f.terms)


@dataclass(frozen=True)
class OneForm:
    """``A dp + B dV``."""

    A: ScalarField = ZERO
    B: ScalarField = ZERO

    def __add__(self, other: OneForm) -> OneForm:
        if not isinstance(other, OneForm):
            return NotImplemented
        return OneForm(self.A + other.A, self.B + other.B)

    def __sub__(self, other: OneForm) -> OneForm:
        if not isinstance(other, OneForm):
            return NotImplemented
        return OneForm(self.A - other.A, self.B - other.B)

    def __neg__(self) -> OneForm:
        return OneForm(-self.A, -self.B)

    def __mul__(self, k: ScalarField | Rational) -> OneForm:
        if not isinstance(k, (ScalarField, int, Fraction)):
            return NotImplemented
        return OneForm(self.A * k, self.B * k)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.A.is_zero() and self.B.is_zero()

    def terms(self) -> Iterator[tuple[str, Monomial]]:
        for m in self.A:
            yield "dp", m
        for m in self.B:
            yield "dV", m

    def render(self) -> str:
        parts = []
        if self.A:
            parts.append(f"{_wrap(self.A)} dp")
        if self.B:
            b = _wrap(self.B)
            if parts and len(self.B) == 1 and self.B.terms[0].coeff < 0:
                parts.append(f" - {self.B.terms[0].render(with_sign=False)} dV")
            else:
                parts.append((" + " if parts else "") + f"{b} dV")
        return "".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.render()


def _wrap(f: ScalarField) -> str:
    s = f.render()
    return f"({s})" if len(f) > 1 else s


@dataclass(frozen=True)
class TwoForm:
    """``C dp^dV``; the only independent component on a 2-manifold."""

    C: ScalarField = ZERO

    def is_zero(self) -> bool:
        return self.C.is_zero()

    def __add__(self, other: TwoForm) -> TwoForm:
        return TwoForm(self.C + other.C)

    def __mul__(self, k: Rational) -> TwoForm:
        return TwoForm(self.C * k)

    __rmul__ = __mul__

    def render(self) -> str:
        return "0" if self.is_zero() else f"{_wrap(self.C)} dp^dV"


@dataclass(frozen=True)
class Potential:
    """``poly + log_p * ln(p) + log_V * ln(V)``.

    The log coefficients may only involve nR, c_v and rationals, so that the
    differential of a Potential is again a Laurent 1-form.
    """

    poly: ScalarField = ZERO
    log_p: ScalarField = ZERO
    log_V: ScalarField = ZERO

    def __post_init__(self):
        if self.log_p.depends_on_state() or self.log_V.depends_on_state():
            raise ValueError("log coefficients must not depend on p or V")

    def __add__(self, other: Potential) -> Potential:
        return Potential(self.poly + other.poly, self.log_p + other.log_p, self.log_V + other.log_V)

    def __sub__(self, other: Potential) -> Potential:
        return self + other * -1

    def __mul__(self, k: Rational) -> Potential:
        return Potential(self.poly * k, self.log_p * k, self.log_V * k)

    __rmul__ = __mul__

    def without_constant(self) -> Potential:
        poly = ScalarField(m for m in self.poly if m.p_pow or m.V_pow)
        return Potential(poly, self.log_p, self.log_V)

    def evaluate(self, p: float, V: float, nR: float = 1.0, cv: float = 1.0) -> float:
        return (
            self.poly.evaluate(p, V, nR, cv)
            + self.log_p.evaluate(p, V, nR, cv) * math.log(p)
            + self.log_V.evaluate(p, V, nR, cv) * math.log(V)
        )

    def render(self) -> str:
        parts = []
        if self.poly:
            parts.append(self.poly.render())
        for coeff, var in ((self.log_p, "p"), (self.log_V, "V")):
            if not coeff:
                continue
            if coeff == ONE:
                term = f"ln({var})"
            elif coeff == -ONE:
                term = f"-ln({var})"
            else:
                term = f"{_wrap(coeff)}*ln({var})"
            if parts and term.startswith("-"):
                parts.append(" - " + term[1:])
            else:
                parts.append((" + " if parts else "") + term)
        return "".join(parts) if parts else "0"

    def __str__(self) -> str:
        return self.render()


def d_scalar(g: ScalarField | Potential) -> OneForm:
    if isinstance(g, ScalarField):
        return OneForm(g.diff_p(), g.diff_V())
    return OneForm(
        g.poly.diff_p() + g.log_p * mono(p=-1),
        g.poly.diff_V() + g.log_V * mono(V=-1),
    )


def d_one(f: OneForm) -> TwoForm:
    return TwoForm(f.B.diff_p() - f.A.diff_V())


def is_closed(f: OneForm) -> bool:
    return d_one(f).is_zero()


def find_potential(f: OneForm) -> Potential:
    """Constructive antiderivative ``g`` with ``d_scalar(g) == f``.

    Integrates ``A`` in p termwise, then integrates what remains of ``B`` in V.
    """
    if not is_closed(f):
        raise NotClosed(f"d({f.render()}) = {d_one(f).render()} != 0")

    poly: list[Monomial] = []
    log_p: list[Monomial] = []
    for m in f.A:
        if m.p_pow == -1:
            if m.V_pow != 0:
                raise NotIntegrable(f"term {m.render()} dp needs V^{m.V_pow}*ln(p)")
            log_p.append(Monomial(m.coeff, m.nR_pow, m.cv_pow, 0, 0))
        else:
            k = m.p_pow + 1
            poly.append(Monomial(m.coeff / k, m.nR_pow, m.cv_pow, k, m.V_pow))
    partial = ScalarField(poly)

    rest = f.B - partial.diff_V()
    log_V: list[Monomial] = []
    for m in rest:
        if m.p_pow != 0:
            raise NotIntegrable(f"residual {m.render()} dV depends on p")
        if m.V_pow == -1:
            log_V.append(Monomial(m.coeff, m.nR_pow, m.cv_pow, 0, 0))
        else:
            k = m.V_pow + 1
            poly.append(Monomial(m.coeff / k, m.nR_pow, m.cv_pow, 0, k))

    g = Potential(ScalarField(poly), ScalarField(log_p), ScalarField(log_V))
    if d_scalar(g) != f:
        raise NotIntegrable(f"reconstruction of {f.render()} did not round-trip")
    return g


# Parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(nR|c_v|dp|dV|p|V)|([-+*/^()]))")
_SYMBOL_FIELD = {"nR": "nR", "c_v": "cv", "p": "p", "V": "V"}


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormSyntaxError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(m.lastindex))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> str | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise FormSyntaxError(f"expected {expected or 'token'} at token {self.i} in {self.text!r}, got {tok!r}")
        self.i += 1
        return tok

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def _rational_in_parens(self) -> bool:
        # '(' ['-'] INT ['/' INT] ')'
        j = 1
        if self.peek(j) == "-":
            j += 1
        if not (self.peek(j) or "").isdigit():
            return False
        j += 1
        if self.peek(j) == "/":
            if not (self.peek(j + 1) or "").isdigit():
                return False
            j += 2
        return self.peek(j) == ")"

    def int_(self) -> int:
        sign = 1
        if self.peek() == "-":
            self.take()
            sign = -1
        tok = self.take()
        if not tok.isdigit():
            raise FormSyntaxError(f"expected integer in {self.text!r}, got {tok!r}")
        return sign * int(tok)

    def rational(self) -> Fraction:
        num = self.int_()
        if self.peek() == "/":
            self.take()
            den = self.int_()
            if den == 0:
                raise FormSyntaxError(f"zero denominator in {self.text!r}")
            return Fraction(num, den)
        return Fraction(num)

    def atom(self) -> ScalarField:
        tok = self.peek()
        if tok == "(":
            if not self._rational_in_parens():
                raise FormSyntaxError(f"unexpected '(' in {self.text!r}")
            self.take("(")
            r = self.rational()
            self.take(")")
            return ScalarField.const(r)
        if tok is not None and tok.isdigit():
            return ScalarField.const(self.rational())
        if tok in _SYMBOL_FIELD:
            self.take()
            k = 1
            if self.peek() == "^":
                self.take()
                k = self.int_()
            return mono(**{_SYMBOL_FIELD[tok]: k})
        raise FormSyntaxError(f"unexpected token {tok!r} in {self.text!r}")

    def monomial(self) -> ScalarField:
        out = self.atom()
        while self.peek() == "*":
            self.take()
            out = out * self.atom()
        return out

    def field(self) -> ScalarField:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        out = self.monomial() * sign
        while self.peek() in ("+", "-"):
            # a sign directly before a group belongs to the enclosing 1-form
            if self.peek(1) == "(" and not self._rational_after_sign():
                break
            s = -1 if self.take() == "-" else 1
            out = out + self.monomial() * s
        return out

    def _rational_after_sign(self) -> bool:
        self.i += 1
        try:
            return self._rational_in_parens()
        finally:
            self.i -= 1

    def group(self) -> ScalarField:
        sign = 1
        if self.peek() in ("+", "-") and self.peek(1) == "(":
            self.i += 1
            is_rat = self._rational_in_parens()
            self.i -= 1
            if not is_rat:
                sign = -1 if self.take() == "-" else 1
        if self.peek() == "(" and not self._rational_in_parens():
            self.take("(")
            f = self.field()
            self.take(")")
            return f * sign
        return self.field() * sign


def parse_field(text: str) -> ScalarField:
    p = _Parser(text)
    f = p.group()
    if not p.done():
        raise FormSyntaxError(f"trailing input in {text!r}")
    return f


def parse_oneform(text: str) -> OneForm:
    """Parse ``[field dp][+ field dV]`` (multi-term fields may be parenthesized)."""
    p = _Parser(text)
    if p.toks == ["0"]:
        return OneForm()
    A = ZERO
    B = ZERO
    f = p.group()
    diff = p.take()
    if diff == "dp":
        A = f
        if not p.done():
            sign = p.take()
            if sign not in ("+", "-"):
                raise FormSyntaxError(f"expected '+' or '-' after dp in {text!r}")
            B = p.group() * (-1 if sign == "-" else 1)
            p.take("dV")
    elif diff == "dV":
        B = f
    else:
        raise FormSyntaxError(f"expected dp or dV in {text!r}, got {diff!r}")
    if not p.done():
        raise FormSyntaxError(f"trailing input in {text!r}")
    return OneForm(A, B)
