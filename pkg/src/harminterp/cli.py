"""Command-line front end for the disc-interpolation toolkit.

Subcommands: ``classify`` (density/separation checks), ``solve``
(positive harmonic interpolation), ``construct`` (boundary-set
construction with margins, separation endgame and an SVG figure),
``probe`` (radial-projection and extremal-feasibility probes), and
``gallery`` (deterministic example sequences).

Sequences travel as JSON documents ``{"label": ..., "points": [[x, y],
...]}`` or ``{"polar": [[r, theta], ...]}``; tabular outputs are CSV;
plots are SVG.  Every file is written atomically (temp + rename) and is
byte-deterministic for fixed inputs and seeds.  Exit codes: 0 success,
2 input error, 3 precondition failure, 4 internal error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import os
import re
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .classify import (
    ClassifierError,
    DensityConstants,
    PointSequence,
    check_condition,
    classify_sequence,
    fit_m,
)
from .disc import DiscPoint, GeometryDomainError
from .gallery import counterexample_pair, dyadic_lattice, radial_geometric
from .measure import BoundaryMeasure, GridSpec, MeasureDomainError, UniformDensity
from .probe import ProbeError, necessity_replay, radial_projection_measure
from .solver import (
    InterpolationProblem,
    SolverError,
    default_grid,
    generate_compatible_values,
    solve_direct,
)
from .stopping import (
    ConstructionError,
    ResolutionError,
    assemble_u,
    build_gn,
    choose_params,
    fit_m0,
    solve_hinfty_partition,
    verify_estimates,
)
from .svgplot import construction_figure

__all__ = ["main", "RunReport", "load_sequence", "sequence_to_json"]

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_INTERNAL = 4

_FIT_ALPHAS = tuple(round(0.1 * k, 1) for k in range(1, 10))
_DEFAULT_LAMBDAS = "2,4,8,16,32,64"


class CliError(Exception):
    """User-facing failure with a fixed process exit code."""

    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# serialization helpers


def _plain(obj):
    """Recursively strip numpy scalar/array types for JSON output."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class RunReport:
    """What a command did: echo, parameters, checks, timings, files."""

    command: str
    parameters: Dict
    results: List[Dict] = field(default_factory=list)
    timings: Dict = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    def as_dict(self) -> Dict:
        return {
            "command": self.command,
            "parameters": _plain(self.parameters),
            "results": _plain(self.results),
            "timings": _plain(self.timings),
            "outputs": list(self.outputs),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2)

    def render_text(self) -> str:
        lines = [f"harminterp {self.command}"]
        for key, value in _plain(self.parameters).items():
            lines.append(f"  {key} = {value}")
        if self.results:
            lines.append("results:")
            for row in _plain(self.results):
                body = "  ".join(f"{k}={v}" for k, v in row.items())
                lines.append(f"  - {body}")
        if self.timings:
            stamp = "  ".join(
                f"{k}={v:.3f}s" for k, v in _plain(self.timings).items()
            )
            lines.append(f"timings: {stamp}")
        for path in self.outputs:
            lines.append(f"wrote {path}")
        return "\n".join(lines)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _write_csv(path: Path, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    _atomic_write(path, buf.getvalue())


# ---------------------------------------------------------------------------
# sequence files

_ENTRY_RE = re.compile(r"\[\s*[-+0-9.eE]+\s*,\s*[-+0-9.eE]+\s*\]")


def _entry_line(text: str, index: int) -> Optional[int]:
    """Line number of the ``index``-th two-number array in the document."""
    seen = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        hits = len(_ENTRY_RE.findall(line))
        if seen + hits > index:
            return lineno
        seen += hits
    return None


def _bad_point(path, index: int, text: str, why: str) -> CliError:
    line = _entry_line(text, index)
    where = f" (line {line})" if line else ""
    return CliError(EXIT_INPUT, f"{path}: point {index} {why}{where}")


def load_sequence(path) -> PointSequence:
    """Read a sequence JSON file, with line-numbered point diagnostics."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_INPUT, f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise CliError(EXIT_INPUT, f"{path}: expected a JSON object")
    if ("points" in doc) == ("polar" in doc):
        raise CliError(
            EXIT_INPUT, f"{path}: provide exactly one of 'points' or 'polar'"
        )
    polar = "polar" in doc
    entries = doc["polar" if polar else "points"]
    if not isinstance(entries, list) or not entries:
        raise CliError(EXIT_INPUT, f"{path}: point list must be a nonempty array")
    pts: List[DiscPoint] = []
    for i, entry in enumerate(entries):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) for v in entry)
            or not all(math.isfinite(float(v)) for v in entry)
        ):
            raise _bad_point(path, i, text, "must be a pair of finite numbers")
        a, b = float(entry[0]), float(entry[1])
        try:
            if polar:
                if not (0.0 <= a < 1.0):
                    raise GeometryDomainError("radius outside [0, 1)")
                pts.append(DiscPoint(b, 1.0 - a))
            else:
                pts.append(DiscPoint.from_xy(a, b))
        except GeometryDomainError as exc:
            raise _bad_point(path, i, text, f"is not inside the open disc ({exc})")
    label = doc.get("label") or path.stem
    try:
        return PointSequence(tuple(pts), label=str(label))
    except ClassifierError as exc:
        match = re.search(r"index (\d+)", str(exc))
        index = int(match.group(1)) if match else 0
        raise _bad_point(path, index, text, "duplicates an earlier point")


def sequence_to_json(seq: PointSequence) -> str:
    """Serialise as the ``polar`` variant, one point per line, repr floats."""
    lines = ["{", f'  "label": {json.dumps(seq.label)},', '  "polar": [']
    n = len(seq.points)
    for i, p in enumerate(seq.points):
        r, t = 1.0 - float(p.depth), float(p.theta)
        comma = "," if i + 1 < n else ""
        lines.append(f"    [{r!r}, {t!r}]{comma}")
    lines.extend(["  ]", "}", ""])
    return "\n".join(lines)


def _load_values(path) -> List[float]:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_INPUT, f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, list) or not all(
        isinstance(v, (int, float)) for v in doc
    ):
        raise CliError(EXIT_INPUT, f"{path}: expected a JSON array of numbers")
    return [float(v) for v in doc]


def _load_measure(spec: str) -> object:
    """Measure argument: ``uniform``, ``atom``, or a CSV path (angle,mass)."""
    if spec == "uniform":
        return UniformDensity()
    if spec == "atom":
        return BoundaryMeasure.single_atom()
    path = Path(spec)
    try:
        text = path.read_text()
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read measure {path}: {exc}") from exc
    angles: List[float] = []
    masses: List[float] = []
    for row in csv.reader(io.StringIO(text)):
        if not row:
            continue
        try:
            a, m = float(row[0]), float(row[1])
        except (ValueError, IndexError):
            if not angles:  # tolerate one header row
                continue
            raise CliError(EXIT_INPUT, f"{path}: malformed CSV row {row!r}")
        angles.append(a)
        masses.append(m)
    if not angles:
        raise CliError(EXIT_INPUT, f"{path}: no atoms found")
    try:
        return BoundaryMeasure(np.array(angles), np.array(masses))
    except MeasureDomainError as exc:
        raise CliError(EXIT_INPUT, f"{path}: {exc}") from exc


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _grid_for(seq: PointSequence, args) -> Optional[GridSpec]:
    if not args.grid:
        return None
    try:
        return GridSpec.for_sequence(list(seq.points), resolution=args.grid)
    except (MeasureDomainError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"bad --grid value: {exc}") from exc


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args) -> RunReport:
    t0 = time.perf_counter()
    seq = load_sequence(args.input)
    out = _outdir(args)
    stem = Path(args.input).stem
    report = RunReport(
        "classify",
        {
            "input": str(args.input),
            "label": seq.label,
            "points": len(seq),
            "mode": "fit" if args.fit else "check",
        },
    )
    if args.fit:
        rows = []
        for alpha in _FIT_ALPHAS:
            minimal = fit_m(seq, alpha, "a")
            rows.append((alpha, minimal))
            report.results.append({"alpha": alpha, "minimal_m": minimal})
        path = out / f"{stem}_fit.csv"
        _write_csv(path, ("alpha", "minimal_m"), rows)
    else:
        try:
            constants = DensityConstants(alpha=args.alpha, m_const=args.m)
        except ClassifierError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from exc
        report.parameters["alpha"] = args.alpha
        report.parameters["m_const"] = args.m
        classification = classify_sequence(seq, constants)
        rows = []
        for res in classification.results:
            witness = json.dumps(_plain(res.witness), sort_keys=True)
            rows.append((res.name, res.passed, res.fitted, witness))
            report.results.append(res.as_dict())
        path = out / f"{stem}_classify.csv"
        _write_csv(path, ("condition", "passed", "fitted", "witness"), rows)
    report.outputs.append(str(path))
    report.timings["total"] = time.perf_counter() - t0
    return report


def cmd_solve(args) -> RunReport:
    t0 = time.perf_counter()
    seq = load_sequence(args.input)
    out = _outdir(args)
    stem = Path(args.input).stem
    if args.values:
        values = _load_values(args.values)
        if len(values) != len(seq):
            raise CliError(
                EXIT_INPUT, f"{len(values)} values for {len(seq)} nodes"
            )
        epsilon = args.epsilon or 0.1
    elif args.epsilon:
        values = list(generate_compatible_values(seq, args.epsilon, seed=args.seed))
        epsilon = args.epsilon
    else:
        raise CliError(EXIT_INPUT, "provide --values FILE or --epsilon E")
    try:
        problem = InterpolationProblem(
            seq, tuple(values), epsilon=epsilon, tolerance=args.tolerance
        )
    except SolverError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    grid = _grid_for(seq, args)
    report = RunReport(
        "solve",
        {
            "input": str(args.input),
            "nodes": len(seq),
            "epsilon": epsilon,
            "tolerance": args.tolerance,
            "seeded_values": args.values is None,
            "seed": args.seed,
        },
    )
    t1 = time.perf_counter()
    result = solve_direct(problem, grid)
    if not result.feasible and not args.no_retry:
        finer = (grid or default_grid(seq)).refine(4)
        report.parameters["retried_grid"] = len(finer.angles())
        result = solve_direct(problem, finer)
    report.timings["solve"] = time.perf_counter() - t1
    report.results.append(
        {
            "status": result.status,
            "grid_size": result.grid_size,
            "slack_total": result.slack_total,
            "slack_budget": result.slack_budget,
        }
    )
    if result.feasible:
        atoms = result.measure
        path = out / f"{stem}_atoms.csv"
        _write_csv(
            path,
            ("angle", "mass"),
            list(zip(atoms.angles.tolist(), atoms.masses.tolist())),
        )
        for n, (target, rel) in enumerate(zip(values, result.residuals)):
            report.results.append(
                {"node": n, "target": target, "rel_error": float(rel)}
            )
    else:
        path = out / f"{stem}_certificate.csv"
        cert = result.certificate
        sides = ["T" if x >= 0 else "S" for x in cert]
        _write_csv(
            path,
            ("node", "x", "side"),
            [(n, float(x), s) for n, (x, s) in enumerate(zip(cert, sides))],
        )
        report.results.append(
            {"certified": result.certified, "upper_side": result.upper_partition}
        )
    report.outputs.append(str(path))
    report.timings["total"] = time.perf_counter() - t0
    return report


def _partition_mask(spec: str, size: int) -> np.ndarray:
    if spec == "alternate":
        return np.arange(size) % 2 == 0
    path = Path(spec)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read partition {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(
            EXIT_INPUT, f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}"
        ) from exc
    if (
        not isinstance(doc, list)
        or len(doc) != size
        or any(side not in ("T", "S") for side in doc)
    ):
        raise CliError(
            EXIT_INPUT,
            f"{path}: partition must be a list of {size} 'T'/'S' markers",
        )
    return np.array([side == "T" for side in doc])


def cmd_construct(args) -> RunReport:
    t0 = time.perf_counter()
    seq = load_sequence(args.input)
    out = _outdir(args)
    stem = Path(args.input).stem
    try:
        m_const = args.m if args.m else fit_m0(seq, args.delta)
    except ConstructionError as exc:
        raise CliError(EXIT_PRECONDITION, f"no admissible box constant: {exc}")
    try:
        constants = DensityConstants(alpha=args.alpha, m_const=m_const)
    except ClassifierError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    condition = check_condition(seq, "a", constants)
    if not condition.passed:
        raise CliError(
            EXIT_PRECONDITION,
            "sequence fails the shell-counting condition at "
            f"alpha={constants.alpha}, M={constants.m_const}: "
            f"witness {json.dumps(_plain(condition.witness), sort_keys=True)}",
        )
    try:
        params = choose_params(seq, constants, args.delta)
        fam = build_gn(seq, params)
    except ConstructionError as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    margins, tails = verify_estimates(fam, seq)
    mask = _partition_mask(args.partition, len(seq))
    grid = _grid_for(seq, args)
    try:
        h, gamma = solve_hinfty_partition(seq, mask, grid)
    except ResolutionError as exc:
        raise CliError(EXIT_PRECONDITION, str(exc)) from exc
    epsilon = min(params.eta, 0.02) / 2.0
    values = generate_compatible_values(seq, epsilon, seed=args.seed)
    u = assemble_u(seq, values, fam, h, grid)

    report = RunReport(
        "construct",
        {
            "input": str(args.input),
            "label": seq.label,
            "points": len(seq),
            "delta": args.delta,
            "alpha": constants.alpha,
            "m_const": constants.m_const,
            "gamma": params.gamma,
            "eta": params.eta,
            "value_epsilon": epsilon,
            "partition": args.partition,
            "seed": args.seed,
        },
    )
    report.results.append(
        {
            "separation_level": gamma,
            "min_cover_margin": float(margins.min()),
            "max_tail_sum": float(tails.max()),
        }
    )
    all_ok = True
    for n, z in enumerate(seq.points):
        side = "T" if mask[n] else "S"
        target = float(values[n])
        achieved = float(u.poisson_eval(z))
        ok = achieved >= target if mask[n] else achieved <= target
        all_ok &= ok
        report.results.append(
            {
                "node": n,
                "side": side,
                "target": target,
                "achieved": achieved,
                "ok": ok,
            }
        )
    report.results.insert(1, {"all_inequalities_ok": all_ok})

    arc_rows = []
    for n, g in enumerate(fam.g_sets):
        for start, end in g.pieces:
            arc_rows.append((n, start, end - start))
    arcs_path = out / f"{stem}_gn_arcs.csv"
    _write_csv(arcs_path, ("node", "arc_start", "arc_length"), arc_rows)
    svg_path = out / f"{stem}_construction.svg"
    _atomic_write(svg_path, construction_figure(seq, fam, label=seq.label).to_xml())
    report.outputs.extend([str(arcs_path), str(svg_path)])
    report.timings["total"] = time.perf_counter() - t0
    return report


def _parse_lambdas(text: str) -> List[float]:
    try:
        lambdas = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CliError(EXIT_INPUT, f"bad --lambdas list: {exc}") from exc
    if not lambdas or any(lam <= 1.0 for lam in lambdas):
        raise CliError(EXIT_INPUT, "--lambdas must all be > 1")
    return lambdas


def cmd_probe(args) -> RunReport:
    t0 = time.perf_counter()
    lambdas = _parse_lambdas(args.lambdas)
    out = _outdir(args)
    report = RunReport(
        "probe",
        {
            "lambdas": lambdas,
            "rays": args.rays,
            "radial": args.radial,
            "seed": args.seed,
        },
    )
    rows: List[Tuple[float, float, float]] = []

    def _project(mu) -> None:
        for lam in lambdas:
            est = radial_projection_measure(
                mu, lam, rays=args.rays, radial=args.radial
            )
            rows.append((lam, est.measure, est.scaled))

    try:
        if args.measure:
            report.parameters["measure"] = args.measure
            stem = Path(args.measure).stem if Path(args.measure).exists() else args.measure
            _project(_load_measure(args.measure))
        elif args.random:
            report.parameters["instances"] = args.random
            stem = f"random{args.random}"
            rng = np.random.default_rng(args.seed)
            worst: Dict[float, Tuple[float, float]] = {lam: (0.0, 0.0) for lam in lambdas}
            fitted = 0.0
            for _ in range(args.random):
                mu = BoundaryMeasure(
                    rng.uniform(0.0, 2 * math.pi, 10), rng.uniform(0.1, 1.0, 10)
                )
                for lam in lambdas:
                    est = radial_projection_measure(
                        mu, lam, rays=args.rays, radial=args.radial
                    )
                    if est.measure > worst[lam][0]:
                        worst[lam] = (est.measure, est.scaled)
                    fitted = max(fitted, est.scaled)
            rows.extend((lam, m, s) for lam, (m, s) in worst.items())
            report.results.append({"fitted_c": fitted})
        elif args.input:
            if not args.epsilon:
                raise CliError(
                    EXIT_INPUT, "sequence probes need --epsilon (or use --measure)"
                )
            seq = load_sequence(args.input)
            stem = Path(args.input).stem
            report.parameters["input"] = str(args.input)
            grid = _grid_for(seq, args)
            replay = necessity_replay(
                seq, args.epsilon, grid=grid, base_index=args.base
            )
            report.results.append(
                {
                    "feasible": replay.feasible,
                    "shell_counts": list(replay.shell_counts),
                    "growth_ceiling": replay.growth_ceiling,
                }
            )
            if replay.feasible:
                _project(replay.result.measure)
        else:
            raise CliError(
                EXIT_INPUT, "provide a sequence file, --measure, or --random N"
            )
    except (ProbeError, SolverError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc

    if rows:
        path = out / f"{stem}_projection.csv"
        _write_csv(path, ("lambda", "projection_measure", "scaled"), rows)
        report.outputs.append(str(path))
    report.timings["total"] = time.perf_counter() - t0
    return report


def cmd_gallery(args) -> RunReport:
    t0 = time.perf_counter()
    out = _outdir(args)
    files: Dict[str, PointSequence] = {}
    try:
        if args.generator == "radial":
            files[f"radial_{args.depth}.json"] = radial_geometric(args.depth)
        elif args.generator == "lattice":
            files[f"lattice_{args.depth}_{args.spread}.json"] = dyadic_lattice(
                args.depth, args.spread
            )
        else:  # counterexample (argparse already vetted the choice)
            if args.levels > 2:
                raise CliError(
                    EXIT_INPUT,
                    "counterexample depths fall below float file resolution "
                    "beyond --levels 2; the library API serves deeper levels "
                    "with high-precision coordinates",
                )
            z1, z2 = counterexample_pair(args.levels)
            union = z1.union(z2, label=f"deep-union-{args.levels}")
            files[f"counterexample{args.levels}_z1.json"] = z1
            files[f"counterexample{args.levels}_z2.json"] = z2
            files[f"counterexample{args.levels}_union.json"] = union
    except (ClassifierError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc
    report = RunReport("gallery", {"generator": args.generator})
    for name, seq in files.items():
        path = out / name
        _atomic_write(path, sequence_to_json(seq))
        report.results.append({"label": seq.label, "points": len(seq)})
        report.outputs.append(str(path))
    report.timings["total"] = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--grid", type=int, default=0, help="grid resolution override")
    common.add_argument(
        "--tolerance", type=float, default=1e-8, help="relative match tolerance"
    )
    common.add_argument("--seed", type=int, default=0, help="seed for generated data")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument(
        "--json", action="store_true", help="print the run report as JSON"
    )

    parser = argparse.ArgumentParser(
        prog="harminterp",
        description="positive harmonic interpolation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="density condition checks")
    p.add_argument("input", help="sequence JSON file")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m", type=float, default=8.0, help="counting constant M")
    p.add_argument("--fit", action="store_true", help="print minimal M per alpha")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("solve", parents=[common], help="interpolate positive values")
    p.add_argument("input", help="sequence JSON file")
    p.add_argument("--values", help="JSON array of target values")
    p.add_argument("--epsilon", type=float, help="generate seeded compatible values")
    p.add_argument(
        "--no-retry",
        action="store_true",
        help="skip the one automatic retry on a 4x refined grid",
    )
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser(
        "construct", parents=[common], help="boundary-set construction + endgame"
    )
    p.add_argument("input", help="sequence JSON file")
    p.add_argument("--delta", type=float, default=0.2, help="coverage defect budget")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--m", type=float, default=0.0, help="box constant (0 = fit)")
    p.add_argument(
        "--partition",
        default="alternate",
        help="'alternate' or a JSON file of 'T'/'S' markers",
    )
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("probe", parents=[common], help="projection/feasibility probes")
    p.add_argument("input", nargs="?", help="sequence JSON file (with --epsilon)")
    p.add_argument(
        "--measure", help="'uniform', 'atom', or a CSV measure file (angle,mass)"
    )
    p.add_argument("--random", type=int, default=0, help="probe N random measures")
    p.add_argument("--epsilon", type=float, help="growth rate for sequence probes")
    p.add_argument("--base", type=int, default=None, help="replay base node index")
    p.add_argument("--lambdas", default=_DEFAULT_LAMBDAS)
    p.add_argument("--rays", type=int, default=8192)
    p.add_argument("--radial", type=int, default=256)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("gallery", parents=[common], help="write example sequences")
    p.add_argument(
        "generator", choices=("radial", "lattice", "counterexample")
    )
    p.add_argument("--depth", type=int, default=8)
    p.add_argument("--spread", type=int, default=2)
    p.add_argument("--levels", type=int, default=2)
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_OK
    except Exception as exc:  # noqa: BLE001 - the exit-4 contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    print(report.to_json() if args.json else report.render_text())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
