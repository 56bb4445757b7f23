"""Dimension algebra over SI base units and the unit-consistency filter for 1-forms."""

from __future__ import annotations

from dataclasses import dataclass, fields
from types import MappingProxyType
from typing import Mapping, NamedTuple

from .errors import UnknownSymbol
from .forms import Monomial, OneForm

__all__ = [
    "Dimension",
    "DIMENSIONLESS",
    "SymbolTable",
    "SI_SYMBOLS",
    "ExponentTuple",
    "dim_mul",
    "dim_pow",
    "monomial_dimension",
    "summands_consistent",
    "exponent_unit_filter",
]


@dataclass(frozen=True)
class Dimension:
    """Integer exponents of (mass, length, time, temperature, amount)."""

    mass: int = 0
    length: int = 0
    time: int = 0
    temperature: int = 0
    amount: int = 0

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def __mul__(self, other: Dimension) -> Dimension:
        return dim_mul(self, other)

    def __truediv__(self, other: Dimension) -> Dimension:
        return dim_mul(self, dim_pow(other, -1))

    def __pow__(self, k: int) -> Dimension:
        return dim_pow(self, k)

    @property
    def dimensionless(self) -> bool:
        return not any(self.as_tuple())

    def __str__(self) -> str:
        names = ("M", "L", "T", "Θ", "N")
        parts = [n if k == 1 else f"{n}^{k}" for n, k in zip(names, self.as_tuple()) if k]
        return " ".join(parts) or "1"


DIMENSIONLESS = Dimension()


def dim_mul(a: Dimension, b: Dimension) -> Dimension:
    return Dimension(*(x + y for x, y in zip(a.as_tuple(), b.as_tuple())))


def dim_pow(d: Dimension, k: int) -> Dimension:
    return Dimension(*(k * x for x in d.as_tuple()))


SymbolTable = Mapping[str, Dimension]

_PRESSURE = Dimension(mass=1, length=-1, time=-2)
_VOLUME = Dimension(length=3)
_ENERGY = Dimension(mass=1, length=2, time=-2)
_HEAT_CAPACITY = Dimension(mass=1, length=2, time=-2, temperature=-1)

# One fixed sample: n is folded into nR and c_v, so amount stays zero.
SI_SYMBOLS: SymbolTable = MappingProxyType(
    {
        "p": _PRESSURE,
        "V": _VOLUME,
        "nR": _HEAT_CAPACITY,
        "c_v": _HEAT_CAPACITY,
        "S": _HEAT_CAPACITY,
        "T": Dimension(temperature=1),
        "E": _ENERGY,
    }
)


def _lookup(syms: SymbolTable, name: str) -> Dimension:
    try:
        return syms[name]
    except KeyError:
        raise UnknownSymbol(name) from None


def monomial_dimension(m: Monomial, syms: SymbolTable = SI_SYMBOLS) -> Dimension:
    out = DIMENSIONLESS
    for name, k in (("nR", m.nR_pow), ("c_v", m.cv_pow), ("p", m.p_pow), ("V", m.V_pow)):
        if k:
            out = dim_mul(out, dim_pow(_lookup(syms, name), k))
    return out


def summands_consistent(f: OneForm, syms: SymbolTable = SI_SYMBOLS) -> bool:
    """True iff every term of ``A dp`` and ``B dV`` carries one common dimension.

    ``dp`` contributes the dimension of p and ``dV`` that of V.  A zero form,
    or a form with one empty side, is judged only on the terms present.
    """
    seen: set[Dimension] = set()
    differential = {"dp": _lookup(syms, "p"), "dV": _lookup(syms, "V")}
    for which, m in f.terms():
        seen.add(dim_mul(monomial_dimension(m, syms), differential[which]))
        if len(seen) > 1:
            return False
    return True


class ExponentTuple(NamedTuple):
    """Exponents of ``p^alpha V^beta dp + p^alpha_p V^beta_p dV``."""

    alpha: int
    beta: int
    alpha_p: int
    beta_p: int


def exponent_unit_filter(t: ExponentTuple) -> bool:
    """Mass and length balance between the dp and dV summands.

    Mass: alpha' = alpha + 1.  Length: -alpha + 3 beta - 1 = -alpha' + 3 beta' + 3.
    The time balance is twice the mass balance and adds nothing.
    """
    alpha, beta, alpha_p, beta_p = t
    return alpha_p == alpha + 1 and -alpha + 3 * beta - 1 == -alpha_p + 3 * beta_p + 3
