"""Command-line front end: ``fastent <subcommand> [flags]``.

Exit codes: 0 success, 1 input error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .measure import DEFAULT_SHOTS, DEFAULT_ORDER, MeasurementPlan, MeasurementRecord, measure
from .mub import build_mub_family, verify_mub
from .qlin import DIM, DensityMatrix, InvalidStateError, PureState, matrix_from_json, matrix_to_json
from .sdp import SdpError
from .statesim import PRESETS, BeamProfile, ModulationPattern, generate_state
from .tomo import i_concurrence, reconstruct
from .witness import DETECTION_TOL, DetectionTrace, run_detection

log = logging.getLogger("fastent")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
TRACE_COLUMNS = ("k", "V", "lambda_min_guess", "residual", "witness_refreshed", "slack", "status")
REPORT_COLUMNS = ("trace", "first_detection_k", "rounds_to_5pct", "final_V", "error")


class InputError(ValueError):
    pass


class NumericalError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2
        self.print_usage(sys.stderr)
        raise InputError(message)


# ---------------------------------------------------------------- file helpers


def write_atomic(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({c: "" if r.get(c) is None else r.get(c) for c in columns})
    return buf.getvalue()


def load_json(path: str | Path):
    p = Path(path)
    if not p.exists():
        raise InputError(f"no such file: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{p}: not valid JSON ({exc})") from exc


def state_to_json(psi: PureState, meta: dict | None = None) -> dict:
    d = {"kind": "pure_state", "amplitudes": matrix_to_json(psi.amplitudes.reshape(DIM, 1))}
    if meta:
        d["meta"] = meta
    return d


def state_from_json(d) -> PureState | DensityMatrix:
    if not isinstance(d, dict) or "kind" not in d:
        raise InputError("state file needs a 'kind' field")
    try:
        if d["kind"] == "pure_state":
            amps = matrix_from_json(d["amplitudes"]).reshape(-1)
            if amps.size != DIM:
                raise InputError(f"pure state needs {DIM} amplitudes, got {amps.size}")
            return PureState(amps)
        if d["kind"] == "density_matrix":
            return DensityMatrix(matrix_from_json(d["matrix"]))
    except (KeyError, InvalidStateError) as exc:
        raise InputError(f"bad state file: {exc}") from exc
    raise InputError(f"unknown state kind {d['kind']!r}")


def load_state(path: str) -> PureState | DensityMatrix:
    return state_from_json(load_json(path))


def load_records(path: str) -> list[MeasurementRecord]:
    data = load_json(path)
    if not isinstance(data, list):
        raise InputError(f"{path}: expected a JSON array of measurement records")
    try:
        return [MeasurementRecord.from_json(r) for r in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad measurement record ({exc})") from exc


def parse_order(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise InputError(f"--order must be comma-separated integers, got {text!r}") from exc


def parse_shots(text: str) -> int | None:
    if text == "exact":
        return None
    try:
        n = int(text)
    except ValueError as exc:
        raise InputError(f"--shots must be a positive integer or 'exact', got {text!r}") from exc
    if n <= 0:
        raise InputError("--shots must be positive")
    return n


def parse_slack(text: str) -> str | float:
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError as exc:
        raise InputError(f"--slack must be 'auto' or a number, got {text!r}") from exc
    if not v > 0:
        raise InputError("--slack must be positive")
    return v


def _density(state: PureState | DensityMatrix) -> DensityMatrix:
    return state.density() if isinstance(state, PureState) else state


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def emit(args, payload: dict, rows: Sequence[dict] | None = None, columns: Sequence[str] | None = None) -> None:
    """Print the command summary to stdout in the requested format."""
    if args.format == "csv" and rows is not None:
        sys.stdout.write(to_csv(rows, columns))
    else:
        sys.stdout.write(dump_json(payload))


# ---------------------------------------------------------------- trace I/O


def trace_rows(trace: DetectionTrace) -> list[dict]:
    return [e.row() for e in trace.entries]


def trace_to_json(trace: DetectionTrace, config: dict) -> dict:
    return {
        "kind": "detection_trace",
        "config": config,
        "first_detection": trace.first_detection(),
        "reference_value": trace.reference_value,
        "rows": trace_rows(trace),
        "errors": [e.error for e in trace.entries if e.error],
    }


@dataclass(frozen=True)
class TraceSummary:
    name: str
    first_detection: int | None
    rounds_to_5pct: int | None
    final_value: float | None

    def row(self) -> dict:
        return {
            "trace": self.name,
            "first_detection_k": self.first_detection,
            "rounds_to_5pct": self.rounds_to_5pct,
            "final_V": self.final_value,
            "error": None,
        }


def summarize_trace(name: str, data: dict) -> TraceSummary:
    """First detection k, rounds until V stays within 5% of the final V, final V."""
    if not isinstance(data, dict) or data.get("kind") != "detection_trace" or "rows" not in data:
        raise InputError("not a detection trace")
    rows = data["rows"]
    if not rows:
        raise InputError("trace has no rows")
    ks = [r["k"] for r in rows]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise InputError("trace rows must have strictly increasing k")
    vals = [r.get("V") for r in rows]
    first = next((r["k"] for r, v in zip(rows, vals) if v is not None and v < -DETECTION_TOL), None)
    final = vals[-1]
    rounds = None
    if final is not None:
        tol = 0.05 * abs(final)
        close = [v is not None and abs(v - final) <= tol for v in vals]
        # last round that was outside the band, plus one
        outside = [i for i, c in enumerate(close) if not c]
        rounds = (outside[-1] + 2) if outside else 1
    return TraceSummary(name, first, rounds, final)


# ---------------------------------------------------------------- subcommands


def cmd_mubgen(args) -> int:
    fam = build_mub_family()
    out = Path(args.out_dir) / (args.out or "mubs.json")
    write_atomic(out, dump_json(fam.to_json()))
    if args.verify:
        report = verify_mub(fam)
        print(report)
        return EXIT_OK if report.passed else EXIT_NUMERIC
    print(f"wrote {out}")
    return EXIT_OK


def _state_from_args(args) -> tuple[PureState, dict]:
    if args.preset is not None:
        if args.transmissions is not None:
            raise InputError("--preset and --transmissions are mutually exclusive")
        pre = PRESETS[args.preset]
        beam, mod = pre.beam, pre.modulation
    else:
        if args.transmissions is None:
            raise InputError("give either --preset or --transmissions")
        beam = BeamProfile.parse(args.beam)
        mod = ModulationPattern.parse(args.transmissions)
    psi = generate_state(beam, mod)
    meta = {
        "preset": args.preset,
        "beam": beam.to_json(),
        "transmissions": list(mod.transmissions),
        "concurrence_sq": i_concurrence(psi),
    }
    return psi, meta


def cmd_simulate_state(args) -> int:
    psi, meta = _state_from_args(args)
    out = Path(args.out_dir) / (args.out or "state.json")
    write_atomic(out, dump_json(state_to_json(psi, meta)))
    emit(args, {"state": str(out), **meta})
    return EXIT_OK


def cmd_measure(args) -> int:
    state = load_state(args.state)
    plan = MeasurementPlan(parse_order(args.order), parse_shots(args.shots))
    records = measure(_density(state), plan, build_mub_family(), seed=args.seed)
    out = Path(args.out_dir) / (args.out or "records.json")
    write_atomic(out, dump_json([r.to_json() for r in records]))
    rows = [r.to_json() for r in records]
    emit(args, {"records": str(out), "count": len(records)}, rows,
         ("basis_index", "vector_index", "p_hat", "shots", "raw_count"))
    return EXIT_OK


def _detect(records, batch, slack) -> DetectionTrace:
    return run_detection(records, build_mub_family(), batch=batch, slack=slack)


def cmd_detect(args) -> int:
    records = load_records(args.records)
    if not records:
        raise InputError("record file is empty")
    slack = parse_slack(args.slack)
    trace = _detect(records, args.batch, slack)
    config = {"records": str(args.records), "batch": args.batch, "slack": args.slack}
    out = Path(args.trace_out) if args.trace_out else Path(args.out_dir) / "trace.json"
    write_atomic(out, dump_json(trace_to_json(trace, config)))
    write_atomic(out.with_suffix(".csv"), to_csv(trace_rows(trace), TRACE_COLUMNS))
    emit(
        args,
        {"trace": str(out), "first_detection": trace.first_detection(), "final_V": trace.final.value},
        trace_rows(trace),
        TRACE_COLUMNS,
    )
    return EXIT_OK


def _tomography_json(res, mode: str) -> dict:
    d = {
        "kind": "tomography",
        "mode": mode,
        "rho_linear": None if res.rho_linear is None else matrix_to_json(res.rho_linear),
        "linear_lambda_min": res.linear_lambda_min,
        "linear_psd": res.linear_psd,
        "rho_pure": None if res.rho_pure is None else matrix_to_json(res.rho_pure.amplitudes.reshape(DIM, 1)),
        "fit_cost": res.fit_cost,
        "concurrence_sq": None if res.rho_pure is None else i_concurrence(res.rho_pure),
        "fidelity_to_target": res.fidelity_to_target,
    }
    return d


def cmd_tomography(args) -> int:
    records = load_records(args.records)
    target = None
    if args.target:
        t = load_state(args.target)
        if not isinstance(t, PureState):
            raise InputError("--target must be a pure state file")
        target = t
    res = reconstruct(records, build_mub_family(), args.mode, args.restarts, target, seed=args.seed)
    out = Path(args.out_dir) / (args.out or "tomography.json")
    d = _tomography_json(res, args.mode)
    write_atomic(out, dump_json(d))
    if res.linear_psd is False:
        log.warning("linear inversion is not PSD (lambda_min = %.3e)", res.linear_lambda_min)
    emit(args, {k: v for k, v in d.items() if k not in ("rho_linear", "rho_pure")} | {"output": str(out)})
    return EXIT_OK


def cmd_concurrence(args) -> int:
    state = load_state(args.state)
    try:
        c2 = i_concurrence(state)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    emit(args, {"state": str(args.state), "concurrence_sq": c2}, [{"concurrence_sq": c2}], ("concurrence_sq",))
    return EXIT_OK


def cmd_pipeline(args) -> int:
    out_dir = Path(args.out_dir)
    order = parse_order(args.order)
    if sorted(order) != list(range(1, 11)):
        raise InputError(f"--order must be a permutation of 1..10, got {order}")
    shots = parse_shots(args.shots)
    slack = parse_slack(args.slack)
    mubs = build_mub_family()

    psi, meta = _state_from_args(args)
    records = measure(psi.density(), MeasurementPlan(order, shots), mubs, seed=args.seed)
    trace = run_detection(records, mubs, batch=args.batch, slack=slack)
    failed = [e for e in trace.entries if e.status == "error"]
    if failed:
        raise NumericalError(f"stage detect: {failed[0].error}")
    try:
        res = reconstruct(records, mubs, "both", args.restarts, psi, seed=args.seed)
    except (SdpError, np.linalg.LinAlgError) as exc:
        raise NumericalError(f"stage tomography: {exc}") from exc

    config = {
        "preset": args.preset,
        "beam": meta["beam"],
        "transmissions": meta["transmissions"],
        "order": list(order),
        "shots": "exact" if shots is None else shots,
        "seed": args.seed,
        "batch": args.batch,
        "slack": args.slack,
        "restarts": args.restarts,
    }
    fid_rows = [{"k": k, "fidelity": f} for k, f in trace.guess_fidelities(psi)]
    artifacts = {
        "state": "state.json",
        "records": "records.json",
        "trace": "trace.json",
        "trace_csv": "trace.csv",
        "fidelity_csv": "fidelity.csv",
        "tomography": "tomography.json",
    }
    write_atomic(out_dir / "state.json", dump_json(state_to_json(psi, meta)))
    write_atomic(out_dir / "records.json", dump_json([r.to_json() for r in records]))
    write_atomic(out_dir / "trace.json", dump_json(trace_to_json(trace, config)))
    write_atomic(out_dir / "trace.csv", to_csv(trace_rows(trace), TRACE_COLUMNS))
    write_atomic(out_dir / "fidelity.csv", to_csv(fid_rows, ("k", "fidelity")))
    write_atomic(out_dir / "tomography.json", dump_json(_tomography_json(res, "both")))
    summary = {
        "first_detection": trace.first_detection(),
        "final_V": trace.final.value,
        "reference_value": trace.reference_value,
        "true_concurrence_sq": meta["concurrence_sq"],
        "reconstructed_concurrence_sq": i_concurrence(res.rho_pure),
        "reconstruction_fidelity": res.fidelity_to_target,
    }
    index = {"kind": "pipeline_index", "config": config, "artifacts": artifacts, "summary": summary}
    write_atomic(out_dir / "index.json", dump_json(index))
    emit(args, summary, [summary], tuple(summary))
    return EXIT_OK


def cmd_report(args) -> int:
    rows, bad = [], 0
    for path in args.traces:
        try:
            rows.append(summarize_trace(path, load_json(path)).row())
        except (InputError, KeyError, TypeError) as exc:
            bad += 1
            print(f"error: {path}: {exc}", file=sys.stderr)
            rows.append({"trace": path, "error": str(exc)})
    out = Path(args.out_dir) / (args.out or "report.csv")
    write_atomic(out, to_csv(rows, REPORT_COLUMNS))
    if args.format == "csv":
        sys.stdout.write(to_csv(rows, REPORT_COLUMNS))
    else:
        table = [[_fmt(r.get(c)) for c in REPORT_COLUMNS] for r in rows]
        widths = [max(len(c), *(len(t[i]) for t in table)) for i, c in enumerate(REPORT_COLUMNS)]
        print("  ".join(c.ljust(w) for c, w in zip(REPORT_COLUMNS, widths)))
        for t in table:
            print("  ".join(v.ljust(w) for v, w in zip(t, widths)))
    return EXIT_INPUT if bad else EXIT_OK


# ---------------------------------------------------------------- parser


def _add_state_flags(p) -> None:
    p.add_argument("--beam", default="uniform", help="uniform | gaussian:w,offset")
    p.add_argument("--transmissions", help="9 comma-separated transmissions in slit order -4..4")
    p.add_argument("--preset", type=int, choices=sorted(PRESETS))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--out-dir", default=argparse.SUPPRESS)
    common.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="fastent", description="Fast entanglement detection for two-qutrit states.")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-v", "--verbose", action="store_true", default=False)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("mubgen", parents=[common], help="write the 10 MUBs as JSON")
    s.add_argument("--verify", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_mubgen)

    s = sub.add_parser("simulate-state", parents=[common], help="synthesize a slit state")
    _add_state_flags(s)
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate_state)

    s = sub.add_parser("measure", parents=[common], help="MUB projection probabilities")
    s.add_argument("--state", required=True)
    s.add_argument("--order", default=",".join(map(str, DEFAULT_ORDER)))
    s.add_argument("--shots", default=str(DEFAULT_SHOTS), help="positive integer or 'exact'")
    s.add_argument("--out")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("detect", parents=[common], help="incremental witness certification")
    s.add_argument("--records", required=True)
    s.add_argument("--batch", choices=("basis", "projector"), default="basis")
    s.add_argument("--slack", default="auto")
    s.add_argument("--trace-out")
    s.set_defaults(func=cmd_detect)

    s = sub.add_parser("tomography", parents=[common], help="reconstruct from all 90 records")
    s.add_argument("--records", required=True)
    s.add_argument("--mode", choices=("linear", "forced-purity", "both"), default="both")
    s.add_argument("--restarts", type=int, default=16)
    s.add_argument("--target")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tomography)

    s = sub.add_parser("concurrence", parents=[common], help="I-concurrence of a pure state")
    s.add_argument("--state", required=True)
    s.set_defaults(func=cmd_concurrence)

    s = sub.add_parser("pipeline", parents=[common], help="state -> measure -> detect -> tomography")
    _add_state_flags(s)
    s.add_argument("--order", default=",".join(map(str, DEFAULT_ORDER)))
    s.add_argument("--shots", default="exact")
    s.add_argument("--batch", choices=("basis", "projector"), default="basis")
    s.add_argument("--slack", default="auto")
    s.add_argument("--restarts", type=int, default=16)
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("report", parents=[common], help="compare detection traces")
    s.add_argument("traces", nargs="+")
    s.add_argument("--out")
    s.set_defaults(func=cmd_report)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (NumericalError, SdpError, np.linalg.LinAlgError, FloatingPointError) as exc:
        # LinAlgError subclasses ValueError, so it must be caught first
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
