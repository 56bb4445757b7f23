"""Enumeration of closed, unit-consistent 1-forms and of linear theorem candidates."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .forms import OneForm, Potential, find_potential, is_closed, mono
from .units import SI_SYMBOLS, ExponentTuple, SymbolTable, exponent_unit_filter, summands_consistent

__all__ = [
    "ExponentTuple",
    "CandidateForm",
    "SingletonTheorem",
    "TheoremCandidate",
    "monomial_form",
    "closed_pairing",
    "primitive",
    "form_complexity",
    "enumerate_closed_forms",
    "theorem_candidates",
    "entropy_theorem_set",
    "LOG_P",
    "LOG_V",
]

LOG_P = OneForm(A=mono(p=-1))
LOG_V = OneForm(B=mono(V=-1))


@dataclass(frozen=True)
class CandidateForm:
    form: OneForm
    provenance: ExponentTuple | str
    potential: Potential

    @property
    def complexity(self) -> int:
        return form_complexity(self.form)

    @property
    def extra_family(self) -> bool:
        """True when the form lies outside span{dp/p, dV/V}.

        Such forms are closed and unit-consistent yet are not of the two-constant
        logarithmic shape; they are reported so the discrepancy stays visible.
        """
        return any(m.key != (-1, 0, 0, 0) for m in self.form.A) or any(
            m.key != (0, -1, 0, 0) for m in self.form.B
        )


def monomial_form(t: ExponentTuple, a: int = 1, b: int = 1) -> OneForm:
    return OneForm(mono(a, p=t.alpha, V=t.beta), mono(b, p=t.alpha_p, V=t.beta_p))


def closed_pairing(t: ExponentTuple) -> list[tuple[int, int]]:
    """Coefficient pairs (a, b) spanning the closed forms with both summands present.

    ``d(a p^al V^be dp + b p^al' V^be' dV) = (b al' p^(al'-1) V^be' - a be p^al V^(be-1)) dp^dV``.
    Both derivatives vanish when be = al' = 0, leaving every pair closed.
    Otherwise the monomials must coincide (al' = al + 1, be' = be - 1) and
    a be = b al', which pins (a, b) to (al', be) up to scale.
    """
    alpha, beta, alpha_p, beta_p = t
    if beta == 0 and alpha_p == 0:
        return [(1, 0), (0, 1)]
    if alpha_p == alpha + 1 and beta_p == beta - 1 and alpha_p != 0 and beta != 0:
        return [(alpha_p, beta)]
    return []


def primitive(f: OneForm) -> OneForm:
    """Scale ``f`` to coprime integer coefficients with a positive leading term."""
    coeffs = [m.coeff for _, m in f.terms()]
    if not coeffs:
        return f
    den = lcm(*(c.denominator for c in coeffs))
    num = gcd(*(int(c * den) for c in coeffs))
    k = Fraction(den, num)
    if coeffs[0] < 0:
        k = -k
    return f * k


def form_complexity(f: OneForm) -> int:
    return sum(abs(m.p_pow) + abs(m.V_pow) + abs(m.nR_pow) + abs(m.cv_pow) for _, m in f.terms())


def enumerate_closed_forms(
    bound: int = 3, syms: SymbolTable = SI_SYMBOLS, *, closed_first: bool = False
) -> list[CandidateForm]:
    """Closed, unit-consistent monomial 1-forms with exponents in [-bound, bound].

    Each exponent tuple is tested with the unit filter and with the
    closedness-matched coefficient pairing; ``closed_first`` only swaps the order
    of the two filters.  The two logarithmic forms dp/p and dV/V come out as
    separate basis elements; every other survivor is the differential of a
    single monomial p^k V^j.  Results are deduplicated up to an overall scalar
    and sorted by total absolute exponent.
    """
    found: dict[OneForm, CandidateForm] = {}
    window = range(-bound, bound + 1)
    for t in map(ExponentTuple._make, itertools.product(window, repeat=4)):
        if closed_first:
            pairs = closed_pairing(t)
            if not pairs or not exponent_unit_filter(t):
                continue
        else:
            if not exponent_unit_filter(t):
                continue
            pairs = closed_pairing(t)
        for a, b in pairs:
            f = primitive(monomial_form(t, a, b))
            if f in found or not is_closed(f) or not summands_consistent(f, syms):
                continue
            found[f] = CandidateForm(f, t, find_potential(f))
    return sorted(found.values(), key=lambda c: (c.complexity, c.form.render()))


@dataclass(frozen=True)
class SingletonTheorem:
    """One hypothesis term.  ``term`` is None for an observed differential such as dS."""

    label: str
    term: OneForm | None = None
    complexity: int = 1

    def __post_init__(self):
        if self.complexity < 1:
            raise ValueError(f"complexity of {self.label!r} must be >= 1")

    @property
    def observed(self) -> bool:
        return self.term is None


@dataclass(frozen=True)
class TheoremCandidate:
    """``c0 + sum_i c_i A_i = 0`` over the member terms."""

    terms: tuple[SingletonTheorem, ...]
    total_complexity: int

    @property
    def observed(self) -> tuple[SingletonTheorem, ...]:
        return tuple(t for t in self.terms if t.observed)

    @property
    def forms(self) -> tuple[SingletonTheorem, ...]:
        return tuple(t for t in self.terms if not t.observed)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(t.label for t in self.terms)

    def render(self) -> str:
        parts = ["c0"]
        for i, t in enumerate(self.terms, 1):
            body = t.label if t.observed else f"({t.term.render()})"
            parts.append(f"c{i}*{body}")
        return " + ".join(parts) + " = 0"


def theorem_candidates(H: Sequence[SingletonTheorem], N: int) -> list[TheoremCandidate]:
    """All nonempty subsets of ``H`` with total complexity at most ``N``.

    Ordered by total complexity, then by member indices lexicographically.
    """
    found: list[tuple[int, tuple[int, ...]]] = []

    def extend(start: int, chosen: tuple[int, ...], cost: int) -> None:
        for i in range(start, len(H)):
            c = cost + H[i].complexity
            if c > N:
                continue
            picked = chosen + (i,)
            found.append((c, picked))
            extend(i + 1, picked, c)

    extend(0, (), 0)
    found.sort()
    return [TheoremCandidate(tuple(H[i] for i in idx), c) for c, idx in found]


def entropy_theorem_set() -> list[SingletonTheorem]:
    """{dS, (1/V) dV, (1/p) dp}, with dS as the observed differential."""
    return [
        SingletonTheorem("dS"),
        SingletonTheorem("V^-1 dV", LOG_V),
        SingletonTheorem("p^-1 dp", LOG_P),
    ]
