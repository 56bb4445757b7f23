"""Command-line driver: ``thermoforms {enumerate,simulate,validate,discover}``.

Exit codes: 0 when a command runs to completion (whatever the verdicts),
2 for usage or configuration errors, 3 for invalid record data.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .enumeration import enumerate_closed_forms, entropy_theorem_set, theorem_candidates
from .errors import DomainError, FormSyntaxError, InconsistentKind, ParseError, ValidationError
from .experiment import (
    GasSpec,
    Trajectory,
    group_records,
    make_path,
    read_records,
    run_experiment,
    write_records,
)
from .forms import parse_oneform
from .validate import discover, discovery_report, fit_theorem, segment_integrals

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    gas: GasSpec
    points: tuple[tuple[float, float], ...] = ()
    kinds: tuple[str, ...] = ()
    samples: int = 101
    bound: int = 3
    budget: int = 3
    tol: float = 1e-6
    max_condition: float = 1e8

    def trajectory(self, samples: int | None = None) -> Trajectory:
        if not self.points:
            raise ConfigError("config has no path")
        return make_path(self.points, self.kinds, samples or self.samples)


def load_config(path: str | Path | None) -> RunConfig:
    if path is None:
        return RunConfig(GasSpec())
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        gas_doc = doc.get("gas", {})
        gas = GasSpec(
            n_moles=float(gas_doc.get("n", 1.0)),
            R=float(gas_doc.get("R", 8.3145)),
            c_v_molar=float(gas_doc.get("cv", 1.5 * float(gas_doc.get("R", 8.3145)))),
            a=float(gas_doc.get("a", 0.0)),
        )
        path_doc = doc.get("path", {})
        points = tuple((float(p), float(V)) for p, V in path_doc.get("points", []))
        kinds = tuple(path_doc.get("kinds", []))
        samples = int(path_doc.get("samples", 101))
        cfg = RunConfig(
            gas,
            points,
            kinds,
            samples,
            int(doc.get("bound", 3)),
            int(doc.get("budget", 3)),
            float(doc.get("tol", 1e-6)),
            float(doc.get("max_condition", 1e8)),
        )
    except (AttributeError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise ConfigError(f"malformed config {path}: {exc}") from None
    if cfg.bound < 0:
        raise ConfigError(f"bound must be >= 0, got {cfg.bound}")
    if cfg.budget < 1:
        raise ConfigError(f"budget must be >= 1, got {cfg.budget}")
    if cfg.samples < 2:
        raise ConfigError(f"need at least 2 samples per segment, got {cfg.samples}")
    if not (cfg.tol > 0 and cfg.max_condition > 0):
        raise ConfigError("tol and max_condition must be positive")
    if points:
        try:
            cfg.trajectory()  # fail early on inconsistent kinds or nonpositive points
        except (DomainError, InconsistentKind):
            raise
        except ValueError as exc:
            raise ConfigError(f"bad path in {path}: {exc}") from None
    return cfg


def _nonneg_int(text: str) -> int:
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if k < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {k}")
    return k


def _pos_int(text: str) -> int:
    k = _nonneg_int(text)
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {k}")
    return k


def _samples(text: str) -> int:
    k = _nonneg_int(text)
    if k < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 samples per segment, got {k}")
    return k


def _pos_float(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not x > 0 or not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be positive, got {text!r}")
    return x


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="thermoforms",
        description="Find exact 1-forms on the ideal-gas manifold and check them against a virtual experiment.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="list closed, unit-consistent monomial 1-forms")
    e.add_argument("--bound", type=_nonneg_int, default=None, help="exponent bound E (default 3)")
    e.add_argument("--config", help="JSON run config")
    e.add_argument("--out", help="also write the list as JSON")

    s = sub.add_parser("simulate", help="run the virtual experiment and write t,p,V,S records")
    s.add_argument("--config", required=True)
    s.add_argument("--samples", type=_samples, default=None, help="samples per segment")
    s.add_argument("--out", help="CSV path (default: stdout)")

    v = sub.add_parser("validate", help="fit dS against the given candidate forms")
    v.add_argument("--config", required=True)
    v.add_argument("--records", help="CSV records (default: simulate from config)")
    v.add_argument("--form", action="append", required=True, help="1-form, e.g. 'p^-1 dp'")
    v.add_argument("--tol", type=_pos_float, default=None)
    v.add_argument("--max-condition", type=_pos_float, default=None)
    v.add_argument("--out", help="JSON report path (default: stdout)")

    d = sub.add_parser("discover", help="enumerate theorems from the entropy set and rank them")
    d.add_argument("--config", required=True)
    d.add_argument("--records", help="CSV records (default: simulate from config)")
    d.add_argument("--budget", type=_pos_int, default=None, help="complexity budget N")
    d.add_argument("--tol", type=_pos_float, default=None)
    d.add_argument("--max-condition", type=_pos_float, default=None)
    d.add_argument("--out", help="JSON report path (default: stdout)")
    return ap


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _records_and_path(cfg: RunConfig, records_file: str | None):
    """Records plus the analytic path to integrate along, when it matches them."""
    if records_file is None:
        traj = cfg.trajectory()
        return run_experiment(cfg.gas, traj), traj
    records = read_records(records_file)
    if not records:
        raise ValidationError(f"{records_file} holds no records")
    if not cfg.points:
        return records, None
    traj = cfg.trajectory()
    groups = group_records(records)
    if len(groups) != len(traj.segments):
        return records, None
    for seg, rows in zip(traj.segments, groups):
        for (p, V), r in ((seg.start, rows[0]), (seg.end, rows[-1])):
            if not (math.isclose(p, r.p, rel_tol=1e-12) and math.isclose(V, r.V, rel_tol=1e-12)):
                return records, None
    return records, traj


def cmd_enumerate(args, cfg: RunConfig) -> int:
    bound = cfg.bound if args.bound is None else args.bound
    found = enumerate_closed_forms(bound)
    lines = [f"# {len(found)} closed, unit-consistent 1-forms with exponents in [-{bound}, {bound}]"]
    for c in found:
        flag = "  [outside span{dp/p, dV/V}]" if c.extra_family else ""
        lines.append(f"{c.form.render()}\tpotential: {c.potential.render()}{flag}")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        doc = [
            {
                "form": c.form.render(),
                "potential": c.potential.render(),
                "exponents": list(c.provenance),
                "complexity": c.complexity,
                "outside_log_span": c.extra_family,
            }
            for c in found
        ]
        Path(args.out).write_text(_dump(doc))
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig) -> int:
    traj = cfg.trajectory(args.samples)
    records = run_experiment(cfg.gas, traj)
    write_records(args.out or sys.stdout, records)
    return EXIT_OK


def cmd_validate(args, cfg: RunConfig) -> int:
    forms = [parse_oneform(text) for text in args.form]
    records, traj = _records_and_path(cfg, args.records)
    si = segment_integrals(forms, group_records(records), cfg.gas, traj)
    tol = cfg.tol if args.tol is None else args.tol
    max_cond = cfg.max_condition if args.max_condition is None else args.max_condition
    rep = fit_theorem(si, tol, max_cond)
    doc = {
        "candidate": "dS = " + " + ".join(f"c{i + 1}'*({f.render()})" for i, f in enumerate(forms)),
        "forms": [f.render() for f in forms],
        "coefficients": list(rep.coefficients),
        "residual_rel": rep.residual_rel,
        "rank": rep.rank,
        "condition": rep.condition if math.isfinite(rep.condition) else None,
        "verdict": rep.verdict,
        "trivial": rep.trivial,
        "overdetermined": rep.overdetermined,
        "segments": [{"delta_S": row.delta_S, "integrals": list(row.integrals)} for row in si],
    }
    _emit(_dump(doc), args.out)
    return EXIT_OK


def cmd_discover(args, cfg: RunConfig) -> int:
    budget = cfg.budget if args.budget is None else args.budget
    tol = cfg.tol if args.tol is None else args.tol
    max_cond = cfg.max_condition if args.max_condition is None else args.max_condition
    records, traj = _records_and_path(cfg, args.records)
    candidates = theorem_candidates(entropy_theorem_set(), budget)
    results = discover(records, candidates, cfg.gas, tol, max_cond, traj)
    doc = discovery_report(results)
    doc["settings"] = {"budget": budget, "tol": tol, "max_condition": max_cond, "analytic_path": traj is not None}
    _emit(_dump(doc), args.out)
    return EXIT_OK


COMMANDS = {
    "enumerate": cmd_enumerate,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "discover": cmd_discover,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(getattr(args, "config", None))
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, DomainError, InconsistentKind, FormSyntaxError) as exc:
        print(f"thermoforms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"thermoforms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
