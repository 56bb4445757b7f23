"""Virtual ideal-gas experiment: paths on the p-V plane and the entropy observable.

Trajectory time runs over [i, i + 1] on segment ``i``, so a record's segment
can be recovered from ``t`` alone.  Junction points are emitted once.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, TextIO

from .errors import DomainError, InconsistentKind, ParseError, ValidationError

__all__ = [
    "GasSpec",
    "PathSegment",
    "Trajectory",
    "ExperimentRecord",
    "KINDS",
    "entropy",
    "make_path",
    "run_experiment",
    "group_records",
    "write_records",
    "read_records",
]

KINDS = ("isochoric", "isobaric", "linear", "isothermal")
CSV_HEADER = ["t", "p", "V", "S"]


@dataclass(frozen=True)
class GasSpec:
    n_moles: float = 1.0
    R: float = 8.3145
    c_v_molar: float = 1.5 * 8.3145
    a: float = 0.0

    def __post_init__(self):
        if not self.n_moles > 0:
            raise DomainError(f"n_moles must be positive, got {self.n_moles}")
        if not (self.R > 0 and self.c_v_molar > 0):
            raise DomainError("R and c_v must be positive")

    @property
    def nR(self) -> float:
        return self.n_moles * self.R

    @property
    def cv(self) -> float:
        """Heat capacity of the whole sample."""
        return self.n_moles * self.c_v_molar


def entropy(g: GasSpec, p: float, V: float) -> float:
    """``n c_v ln(pV / nR) + nR ln V + a``; the 1-mole case is the textbook formula."""
    if not (p > 0 and V > 0):
        raise DomainError(f"entropy needs p > 0 and V > 0, got p={p}, V={V}")
    return g.cv * math.log(p * V / g.nR) + g.nR * math.log(V) + g.a


def _close(x: float, y: float) -> bool:
    return math.isclose(x, y, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class PathSegment:
    kind: str
    start: tuple[float, float]
    end: tuple[float, float]
    samples: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InconsistentKind(f"unknown segment kind {self.kind!r}")
        if self.samples < 2:
            raise ValueError("a segment needs at least 2 samples")
        (p0, V0), (p1, V1) = self.start, self.end
        for p, V in (self.start, self.end):
            if not (p > 0 and V > 0):
                raise DomainError(f"path point ({p}, {V}) is not in the positive quadrant")
        if self.kind == "isochoric" and not _close(V0, V1):
            raise InconsistentKind(f"isochoric segment changes volume {V0} -> {V1}")
        if self.kind == "isobaric" and not _close(p0, p1):
            raise InconsistentKind(f"isobaric segment changes pressure {p0} -> {p1}")
        if self.kind == "isothermal" and not _close(p0 * V0, p1 * V1):
            raise InconsistentKind(f"isothermal segment changes pV {p0 * V0} -> {p1 * V1}")

    def point(self, s: float) -> tuple[float, float]:
        """Position at local parameter ``s`` in [0, 1]; endpoints are returned exactly."""
        if s == 0.0:
            return self.start
        if s == 1.0:
            return self.end
        (p0, V0), (p1, V1) = self.start, self.end
        if self.kind == "isochoric":
            return p0 * (1 - s) + p1 * s, V0
        if self.kind == "isobaric":
            return p0, V0 * (1 - s) + V1 * s
        V = V0 * (1 - s) + V1 * s
        if self.kind == "isothermal":
            return p0 * V0 / V, V
        return p0 * (1 - s) + p1 * s, V

    def velocity(self, s: float) -> tuple[float, float]:
        """(dp/ds, dV/ds) of the exact parameterization."""
        (p0, V0), (p1, V1) = self.start, self.end
        if self.kind == "isochoric":
            return p1 - p0, 0.0
        if self.kind == "isobaric":
            return 0.0, V1 - V0
        if self.kind == "isothermal":
            V = V0 * (1 - s) + V1 * s
            return -p0 * V0 * (V1 - V0) / (V * V), V1 - V0
        return p1 - p0, V1 - V0


@dataclass(frozen=True)
class Trajectory:
    segments: tuple[PathSegment, ...]

    def __post_init__(self):
        if not self.segments:
            raise ValueError("a trajectory needs at least one segment")
        for a, b in zip(self.segments, self.segments[1:]):
            if a.end != b.start:
                raise InconsistentKind(f"segments do not join: {a.end} != {b.start}")

    @property
    def start(self) -> tuple[float, float]:
        return self.segments[0].start

    @property
    def end(self) -> tuple[float, float]:
        return self.segments[-1].end

    def samples(self) -> list[tuple[float, float, float]]:
        """(t, p, V) rows, ``t = i + k / (n - 1)`` on segment ``i``."""
        rows = []
        for i, seg in enumerate(self.segments):
            n = seg.samples
            first = 0 if i == 0 else 1
            for k in range(first, n):
                s = k / (n - 1)
                p, V = seg.point(s)
                rows.append((i + s, p, V))
        return rows


def make_path(
    points: Sequence[tuple[float, float]],
    kinds: Sequence[str],
    samples_per_segment: int = 101,
) -> Trajectory:
    if len(points) < 2:
        raise ValueError("a path needs at least two points")
    if len(kinds) != len(points) - 1:
        raise InconsistentKind(f"{len(points)} points need {len(points) - 1} kinds, got {len(kinds)}")
    pts = [(float(p), float(V)) for p, V in points]
    segs = tuple(
        PathSegment(kind, a, b, samples_per_segment)
        for kind, a, b in zip(kinds, pts, pts[1:])
    )
    return Trajectory(segs)


@dataclass(frozen=True)
class ExperimentRecord:
    t: float
    p: float
    V: float
    S: float


def run_experiment(g: GasSpec, traj: Trajectory) -> list[ExperimentRecord]:
    return [ExperimentRecord(t, p, V, entropy(g, p, V)) for t, p, V in traj.samples()]


def group_records(records: Sequence[ExperimentRecord]) -> list[list[ExperimentRecord]]:
    """Split records into segments by integer part of ``t``; junctions are shared.

    Segment ``i`` holds every record with ``i <= t <= i + 1``.
    """
    if not records:
        return []
    t0 = math.floor(records[0].t)
    last = records[-1].t
    n_seg = max(1, math.ceil(last) - t0)
    groups: list[list[ExperimentRecord]] = [[] for _ in range(n_seg)]
    for r in records:
        rel = r.t - t0
        i = min(int(math.floor(rel)), n_seg - 1)
        groups[i].append(r)
        if rel == i and i > 0:
            groups[i - 1].append(r)
    for g in groups:
        g.sort(key=lambda r: r.t)
    return [g for g in groups if g]


def write_records(path: str | Path | TextIO, records: Sequence[ExperimentRecord]) -> None:
    """Write a ``t,p,V,S`` CSV; ``repr`` keeps every float round-trippable."""
    if hasattr(path, "write"):
        _write_rows(path, records)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(fh, records)


def _write_rows(fh: TextIO, records: Sequence[ExperimentRecord]) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([repr(r.t), repr(r.p), repr(r.V), repr(r.S)])


def read_records(path: str | Path) -> list[ExperimentRecord]:
    """Read a ``t,p,V,S`` CSV; rows must have strictly increasing t and positive p, V."""
    out: list[ExperimentRecord] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != CSV_HEADER:
            raise ParseError(f"expected header {','.join(CSV_HEADER)}, got {header}", line=1)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 4:
                raise ParseError(f"expected 4 fields, got {len(row)}", line=line)
            try:
                t, p, V, S = (float(c) for c in row)
            except ValueError as exc:
                raise ParseError(str(exc), line=line) from None
            if not all(math.isfinite(x) for x in (t, p, V, S)):
                raise ValidationError("non-finite value", line=line)
            if not (p > 0 and V > 0):
                raise ValidationError(f"p and V must be positive, got p={p}, V={V}", line=line)
            if out and not t > out[-1].t:
                raise ValidationError(f"t is not increasing ({out[-1].t} then {t})", line=line)
            out.append(ExperimentRecord(t, p, V, S))
    return out
