"""Pullback integrals of 1-forms along trajectories and linear theorem fitting.

For a theorem ``c0 + c1 dS + sum_i c_i f_i = 0`` integrated over a path
segment, the additive constant drops out and, with primed constants
``c_i' = -c_i / c1``,

    S(end) - S(start) = sum_i c_i' * integral of f_i along the segment

One such row per segment gives a linear system for the ``c_i'``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .enumeration import TheoremCandidate
from .errors import DomainError, NonFinite, ValidationError
from .experiment import ExperimentRecord, GasSpec, PathSegment, Trajectory, group_records
from .forms import OneForm, Potential, find_potential

__all__ = [
    "adaptive_simpson",
    "pullback_integral",
    "SegmentIntegrals",
    "segment_integrals",
    "FitReport",
    "fit_theorem",
    "NumericPotential",
    "numeric_potential",
    "Discovery",
    "discover",
    "identify_constant",
    "discovery_report",
    "VALID",
    "INVALID",
    "UNDERDETERMINED",
]

VALID = "Valid"
INVALID = "Invalid"
UNDERDETERMINED = "Underdetermined"


def adaptive_simpson(
    func: Callable[[float], float],
    a: float,
    b: float,
    rel_tol: float = 1e-10,
    panels: int = 8,
    max_depth: int = 40,
    scale: float | None = None,
) -> float:
    """Adaptive composite Simpson rule.

    The error target is ``rel_tol * scale``.  ``scale`` defaults to a Simpson
    estimate of the integral of ``|func|``; callers whose integrand is a sum of
    cancelling parts should pass the magnitude of the parts instead, otherwise
    an integrand that is zero up to roundoff can never meet the target.
    """
    if a == b:
        return 0.0
    xs = [a + (b - a) * k / (2 * panels) for k in range(2 * panels + 1)]
    ys = [func(x) for x in xs]
    h = (b - a) / panels
    wholes = [h / 6 * (ys[2 * k] + 4 * ys[2 * k + 1] + ys[2 * k + 2]) for k in range(panels)]
    if scale is None:
        scale = abs(h) / 6 * sum(
            abs(ys[2 * k]) + 4 * abs(ys[2 * k + 1]) + abs(ys[2 * k + 2]) for k in range(panels)
        )
    if not math.isfinite(scale):
        return math.nan
    if scale == 0.0:
        return 0.0
    eps = rel_tol * scale / panels

    def refine(lo, hi, f_lo, f_mid, f_hi, whole, eps, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        f_lm, f_rm = func(lm), func(rm)
        left = (mid - lo) / 6 * (f_lo + 4 * f_lm + f_mid)
        right = (hi - mid) / 6 * (f_mid + 4 * f_rm + f_hi)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * eps or not math.isfinite(delta):
            return left + right + delta / 15
        return refine(lo, mid, f_lo, f_lm, f_mid, left, eps / 2, depth - 1) + refine(
            mid, hi, f_mid, f_rm, f_hi, right, eps / 2, depth - 1
        )

    total = 0.0
    for k in range(panels):
        total += refine(
            xs[2 * k], xs[2 * k + 2], ys[2 * k], ys[2 * k + 1], ys[2 * k + 2], wholes[k], eps, max_depth
        )
    return total


def _compile(f: OneForm, g: GasSpec):
    return f.A.compile(g.nR, g.cv), f.B.compile(g.nR, g.cv)


def _simpson_weights(panels: int) -> list[int]:
    w = [0] * (2 * panels + 1)
    for k in range(panels):
        w[2 * k] += 1
        w[2 * k + 1] += 4
        w[2 * k + 2] += 1
    return w


def _segment_integral(A, B, seg: PathSegment, rel_tol: float, panels: int = 8) -> float:
    def parts(s: float) -> tuple[float, float]:
        p, V = seg.point(s)
        if not (p > 0 and V > 0):
            raise DomainError(f"path leaves the positive quadrant at p={p}, V={V}")
        dp, dV = seg.velocity(s)
        return (A(p, V) * dp if dp else 0.0), (B(p, V) * dV if dV else 0.0)

    def integrand(s: float) -> float:
        a, b = parts(s)
        return a + b

    if seg.start == seg.end:
        return 0.0
    try:
        nodes = [k / (2 * panels) for k in range(2 * panels + 1)]
        mags = [abs(a) + abs(b) for a, b in map(parts, nodes)]
        magnitude = sum(w * m for w, m in zip(_simpson_weights(panels), mags)) / (6 * panels)
        value = adaptive_simpson(integrand, 0.0, 1.0, rel_tol, panels=panels, scale=magnitude)
    except (OverflowError, ZeroDivisionError) as exc:
        raise NonFinite(f"integral along {seg.kind} segment failed: {exc}") from None
    if not math.isfinite(value):
        raise NonFinite(f"integral along {seg.kind} segment is {value}")
    return value


def pullback_integral(
    f: OneForm, traj: Trajectory | PathSegment, g: GasSpec, rel_tol: float = 1e-10
) -> float:
    """Line integral of ``f`` along the exact parameterization of ``traj``.

    nR and c_v are replaced by the sample's values from ``g``.
    """
    A, B = _compile(f, g)
    segments = (traj,) if isinstance(traj, PathSegment) else traj.segments
    return sum(_segment_integral(A, B, seg, rel_tol) for seg in segments)


def _chord_integral(A, B, rows: Sequence[ExperimentRecord], rel_tol: float) -> float:
    # Straight chords between consecutive records: exact for isochoric,
    # isobaric and linear paths, second-order accurate for curved ones.
    total = 0.0
    for r0, r1 in zip(rows, rows[1:]):
        chord = PathSegment("linear", (r0.p, r0.V), (r1.p, r1.V))
        total += _segment_integral(A, B, chord, rel_tol, panels=2)
    return total


@dataclass(frozen=True)
class SegmentIntegrals:
    segment_id: int
    delta_S: float
    integrals: tuple[float, ...]


def segment_integrals(
    forms: Sequence[OneForm],
    segments: Sequence[Sequence[ExperimentRecord]],
    g: GasSpec,
    path: Trajectory | None = None,
    rel_tol: float = 1e-10,
) -> list[SegmentIntegrals]:
    """Entropy change and one pullback integral per form, for every segment.

    With ``path`` the integrals use the analytic segment parameterization;
    otherwise they follow chords between the records of each segment.
    """
    if not segments:
        raise ValidationError("no segments to integrate over")
    if path is not None and len(path.segments) != len(segments):
        raise ValidationError(
            f"path has {len(path.segments)} segments but records span {len(segments)}"
        )
    compiled = [_compile(f, g) for f in forms]
    out = []
    for i, rows in enumerate(segments):
        if len(rows) < 2:
            raise ValidationError(f"segment {i} has {len(rows)} record(s); need at least 2")
        if path is not None:
            vals = tuple(_segment_integral(A, B, path.segments[i], rel_tol) for A, B in compiled)
        else:
            vals = tuple(_chord_integral(A, B, rows, rel_tol) for A, B in compiled)
        out.append(SegmentIntegrals(i, rows[-1].S - rows[0].S, vals))
    return out


@dataclass(frozen=True)
class FitReport:
    coefficients: tuple[float, ...]
    residual_rel: float
    rank: int
    condition: float
    verdict: str
    trivial: bool = False
    segments: int = 0
    unknowns: int = 0

    @property
    def overdetermined(self) -> bool:
        return self.segments > self.unknowns


def fit_theorem(
    si: Sequence[SegmentIntegrals],
    tol_rel: float = 1e-6,
    max_condition: float = 1e8,
    homogeneous: bool = False,
) -> FitReport:
    """Least-squares solve of ``M c = dS`` with one row per segment.

    Columns are scaled to unit norm before the solve; rank and condition refer
    to the scaled matrix.  ``homogeneous`` fits ``M c = 0`` (a theorem without
    an observed differential), which can only produce the trivial solution.

    Verdicts: Underdetermined when rank < unknowns; Invalid when the solution is
    trivial, the condition exceeds ``max_condition`` or the relative residual
    exceeds ``tol_rel``; Valid otherwise.
    """
    if not si:
        raise ValidationError("fit needs at least one segment")
    k = len(si[0].integrals)
    M = np.array([row.integrals for row in si], dtype=float).reshape(len(si), k)
    b = np.zeros(len(si)) if homogeneous else np.array([row.delta_S for row in si], dtype=float)
    b_norm = float(np.linalg.norm(b))

    if k == 0:
        residual = 1.0 if b_norm > 0 else 0.0
        return FitReport((), residual, 0, 1.0, INVALID, True, len(si), 0)

    col_norm = np.linalg.norm(M, axis=0)
    scale = np.where(col_norm > 0, col_norm, 1.0)
    Ms = M / scale
    sv = np.linalg.svd(Ms, compute_uv=False)
    smax = float(sv[0]) if sv.size else 0.0
    rank = int(np.sum(sv > smax * max(Ms.shape) * np.finfo(float).eps)) if smax > 0 else 0
    condition = smax / float(sv[-1]) if rank == k else math.inf

    c_scaled, *_ = np.linalg.lstsq(Ms, b, rcond=None)
    c = c_scaled / scale
    r = float(np.linalg.norm(M @ c - b))
    residual = r / b_norm if b_norm > 0 else r
    trivial = b_norm == 0.0 or not np.any(c)

    if rank < k:
        verdict = UNDERDETERMINED
    elif trivial or condition > max_condition or residual > tol_rel:
        verdict = INVALID
    else:
        verdict = VALID
    return FitReport(tuple(float(x) for x in c), float(residual), rank, float(condition), verdict, bool(trivial), len(si), k)


@dataclass(frozen=True)
class NumericPotential:
    """``sum c * p^a * V^b + log_p ln p + log_V ln V`` with constants substituted."""

    poly: tuple[tuple[float, int, int], ...] = ()
    log_p: float = 0.0
    log_V: float = 0.0

    def __call__(self, p: float, V: float) -> float:
        return (
            sum(c * p**a * V**b for c, a, b in self.poly)
            + self.log_p * math.log(p)
            + self.log_V * math.log(V)
        )

    def __add__(self, other: NumericPotential) -> NumericPotential:
        acc: dict[tuple[int, int], float] = {}
        for c, a, b in self.poly + other.poly:
            acc[(a, b)] = acc.get((a, b), 0.0) + c
        poly = tuple((c, a, b) for (a, b), c in sorted(acc.items()) if c != 0.0)
        return NumericPotential(poly, self.log_p + other.log_p, self.log_V + other.log_V)

    def scaled(self, k: float) -> NumericPotential:
        return NumericPotential(tuple((k * c, a, b) for c, a, b in self.poly), k * self.log_p, k * self.log_V)

    def render(self) -> str:
        parts = []
        for c, a, b in self.poly:
            atoms = [f"p^{a}" if a != 1 else "p"] if a else []
            atoms += [f"V^{b}" if b != 1 else "V"] if b else []
            parts.append("*".join([repr(c)] + atoms))
        if self.log_p:
            parts.append(f"{self.log_p!r}*ln(p)")
        if self.log_V:
            parts.append(f"{self.log_V!r}*ln(V)")
        parts.append("const")
        return " + ".join(parts).replace("+ -", "- ")


def numeric_potential(g_sym: Potential, gas: GasSpec) -> NumericPotential:
    nR, cv = gas.nR, gas.cv
    poly = tuple(
        (float(m.coeff) * nR**m.nR_pow * cv**m.cv_pow, m.p_pow, m.V_pow)
        for m in g_sym.poly
        if m.p_pow or m.V_pow
    )
    return NumericPotential(poly, g_sym.log_p.evaluate(1.0, 1.0, nR, cv), g_sym.log_V.evaluate(1.0, 1.0, nR, cv))


def identify_constant(value: float, gas: GasSpec, rel: float = 1e-3) -> str | None:
    """Name ``value`` as a small combination a*c_v + b*nR if one matches within ``rel``."""
    combos = [(a, b) for a in range(3) for b in range(3) if a or b]
    combos.sort(key=lambda ab: (ab[0] + ab[1], -ab[0]))
    for a, b in combos:
        target = a * gas.cv + b * gas.nR
        if math.isclose(value, target, rel_tol=rel):
            parts = []
            if a:
                parts.append("c_v" if a == 1 else f"{a}*c_v")
            if b:
                parts.append("nR" if b == 1 else f"{b}*nR")
            return " + ".join(parts)
    return None


@dataclass(frozen=True)
class Discovery:
    candidate: TheoremCandidate
    report: FitReport
    potential: NumericPotential | None = None
    annotations: tuple[str | None, ...] = field(default_factory=tuple)

    def render(self) -> str:
        """``dS = c'*(form) + ...`` with the fitted primed constants."""
        observed = self.candidate.observed
        lhs = observed[0].label if observed else "0"
        rhs = [
            f"{c!r}*({t.term.render()})" for c, t in zip(self.report.coefficients, self.candidate.forms)
        ]
        return f"{lhs} = " + (" + ".join(rhs) if rhs else "0")


def discover(
    records: Sequence[ExperimentRecord] | Sequence[Sequence[ExperimentRecord]],
    candidates: Sequence[TheoremCandidate],
    g: GasSpec,
    tol: float = 1e-6,
    max_condition: float = 1e8,
    path: Trajectory | None = None,
    min_segments: int | None = None,
) -> list[Discovery]:
    """Fit every candidate and rank the results.

    Valid theorems come first, ordered by (complexity, residual).  Next come
    nontrivial Underdetermined fits, which more segments could still settle,
    then everything else; both groups keep their enumeration order.  ``records`` is either a flat record list, split
    into segments by ``t``, or an explicit list of segments.

    With fewer than ``min_segments`` segments (default: the largest number of
    unknowns among the candidates containing dS) the records cannot tell the candidates
    apart, since any small enough candidate fits them exactly; every fit that
    would be Valid is then reported as Underdetermined.
    """
    if not candidates:
        return []
    if records and isinstance(records[0], ExperimentRecord):
        segments = group_records(records)
    else:
        segments = [list(s) for s in records]

    cache: dict[OneForm, tuple[float, ...]] = {}
    needed = [t.term for c in candidates for t in c.forms if t.term not in cache]
    unique = list(dict.fromkeys(needed))
    if unique:
        si_all = segment_integrals(unique, segments, g, path)
        for j, f in enumerate(unique):
            cache[f] = tuple(row.integrals[j] for row in si_all)
    deltas = [rows[-1].S - rows[0].S for rows in segments]
    if min_segments is None:
        min_segments = max((len(c.forms) for c in candidates if c.observed), default=0)
    discriminating = len(segments) >= min_segments

    results = []
    for order, cand in enumerate(candidates):
        if len(cand.observed) > 1:
            raise ValueError(f"{cand.render()}: at most one observed differential is supported")
        cols = [cache[t.term] for t in cand.forms]
        si = [
            SegmentIntegrals(i, deltas[i], tuple(col[i] for col in cols)) for i in range(len(segments))
        ]
        rep = fit_theorem(si, tol, max_condition, homogeneous=not cand.observed)
        if rep.verdict == VALID and not discriminating:
            rep = replace(rep, verdict=UNDERDETERMINED)
        pot = None
        if rep.verdict == VALID:
            pot = NumericPotential()
            for c, t in zip(rep.coefficients, cand.forms):
                pot = pot + numeric_potential(find_potential(t.term), g).scaled(c)
        notes = tuple(identify_constant(c, g) for c in rep.coefficients)
        results.append((order, Discovery(cand, rep, pot, notes)))

    def rank_key(item):
        order, d = item
        if d.report.verdict == VALID:
            return (0, d.candidate.total_complexity, d.report.residual_rel, order)
        if d.report.verdict == UNDERDETERMINED and not d.report.trivial:
            return (1, 0, 0.0, order)
        return (2, 0, 0.0, order)

    return [d for _, d in sorted(results, key=rank_key)]


def _finite_or_none(x: float) -> float | None:
    return x if math.isfinite(x) else None


def discovery_report(results: Sequence[Discovery]) -> dict:
    """JSON-ready report: one entry per candidate plus a summary of the best theorem."""
    entries = []
    for d in results:
        r = d.report
        entries.append(
            {
                "candidate": d.candidate.render(),
                "terms": list(d.candidate.labels),
                "complexity": d.candidate.total_complexity,
                "coefficients": list(r.coefficients),
                "residual_rel": r.residual_rel,
                "rank": r.rank,
                "condition": _finite_or_none(r.condition),
                "verdict": r.verdict,
                "trivial": r.trivial,
                "overdetermined": r.overdetermined,
            }
        )
    summary: dict = {"best": None}
    if results:
        best = results[0]
        summary = {
            "best": best.candidate.render(),
            "verdict": best.report.verdict,
            "theorem": best.render() if best.report.verdict == VALID else None,
            "coefficients": {
                t.label: c for t, c in zip(best.candidate.forms, best.report.coefficients)
            },
            "annotations": {
                t.label: note for t, note in zip(best.candidate.forms, best.annotations) if note
            },
            "potential": best.potential.render() if best.potential else None,
            "potential_terms": (
                {
                    "log_p": best.potential.log_p,
                    "log_V": best.potential.log_V,
                    "poly": [list(term) for term in best.potential.poly],
                }
                if best.potential
                else None
            ),
            "overdetermined": best.report.overdetermined,
        }
    return {"candidates": entries, "summary": summary}
