"""Command-line front end.

One verb per invocation; states and channels are given as file paths or
inline JSON.  Exit codes: 0 on success (an infeasible verdict is a
successful report, not an error), 1 on usage errors, 2 on domain errors.
Every report carries the library version and the active tolerance in a
header field, and identical argv plus seed produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__, asymptotic, channels, config, monotones, singlecopy, states
from .errors import FramenessError
from .wigner import HalfInt, three_j

USAGE_EXIT = 1
DOMAIN_EXIT = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def _load_blob(text: str) -> dict:
    text = text.strip()
    if text.startswith("{") or text.startswith("["):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _load_state(text: str, ssr: str | None) -> states.WeightState:
    return states.from_json(_load_blob(text), ssr)


def _sanitize(value):
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        if math.isnan(value):
            return "nan"
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    return value


def _emit(args, payload: dict, csv_rows: tuple[list[str], list[list]] | None = None):
    if getattr(args, "format", "json") == "csv" and csv_rows is not None:
        header, rows = csv_rows
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
        text = buffer.getvalue()
    else:
        body = {
            "header": {"version": __version__, "tolerance": config.tolerance()},
        }
        body.update(_sanitize(payload))
        text = json.dumps(body, sort_keys=True, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _add_common(sub, state_args: int = 0, needs_ssr: bool = True, ssr_required: bool = False):
    if needs_ssr:
        sub.add_argument(
            "--ssr",
            choices=["z2", "u1", "su2"],
            required=ssr_required,
            help="superselection rule",
        )
    if state_args >= 1:
        sub.add_argument("--source", required=True, help="state JSON or file path")
    if state_args >= 2:
        sub.add_argument("--target", required=True, help="state JSON or file path")
    sub.add_argument("--out", help="write the report to this file instead of stdout")
    sub.add_argument("--tol", type=float, help="override the global tolerance")


def build_parser() -> _Parser:
    parser = _Parser(prog="frameness", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    verbs = parser.add_subparsers(dest="verb", required=True)

    sub = verbs.add_parser("spectrum", help="support labels, gaplessness, resource flag")
    _add_common(sub, state_args=1)

    sub = verbs.add_parser("monotones", help="all measures applicable to a state")
    _add_common(sub, state_args=1)

    sub = verbs.add_parser("det", help="deterministic convertibility certificate")
    _add_common(sub, state_args=2)

    sub = verbs.add_parser("stoch", help="stochastic convertibility and admissible shifts")
    _add_common(sub, state_args=2)

    sub = verbs.add_parser("maxprob", help="maximum conversion probability")
    _add_common(sub, state_args=2)

    sub = verbs.add_parser("ensemble-z2", help="synthesize a pure-to-ensemble Z2 channel")
    _add_common(sub, state_args=1, needs_ssr=False)
    sub.add_argument(
        "--targets",
        required=True,
        help='JSON list [{"weight": w, "state": {...}}, ...] or file path',
    )

    sub = verbs.add_parser("rate", help="asymptotic conversion rate (single pair or sweep)")
    _add_common(sub)
    sub.add_argument("--source", help="state JSON or file path")
    sub.add_argument("--target", help="state JSON or file path")
    sub.add_argument("--states", help='sweep input: JSON {"id": weights, ...}')
    sub.add_argument("--N", type=int, help="copies for desk-scale evidence")
    sub.add_argument("--format", choices=["json", "csv"], default="json")

    sub = verbs.add_parser("verify-rate", help="desk-scale fidelity of a rate claim")
    _add_common(sub, state_args=2)
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--M", type=int, help="target copies (default floor(N*rate))")
    sub.add_argument("--window", type=int, default=asymptotic.DEFAULT_WINDOW)

    sub = verbs.add_parser("tensor-power", help="exact N-fold product distribution")
    _add_common(sub, state_args=1)
    sub.add_argument("--N", type=int, required=True)
    sub.add_argument("--window", type=int, default=asymptotic.DEFAULT_WINDOW)
    sub.add_argument("--format", choices=["json", "csv"], default="json")

    sub = verbs.add_parser("apply-channel", help="measurement branches of a channel")
    _add_common(sub, state_args=1, needs_ssr=True)
    sub.add_argument("--channel", required=True, help="channel JSON or file path")

    sub = verbs.add_parser("twirl", help="group-average a density matrix")
    _add_common(sub, ssr_required=True)
    sub.add_argument(
        "--matrix", required=True, help="JSON matrix (entries real or [re, im])"
    )

    sub = verbs.add_parser("audit", help="randomized ensemble-monotonicity audit")
    _add_common(sub, ssr_required=True)
    sub.add_argument("--trials", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)

    sub = verbs.add_parser("wigner3j", help="Wigner 3j symbol (half-integers like 3/2)")
    # let bare negative half-integers (-1, -1/2, -1.5) through as positionals
    sub._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$|^-\d*\.\d+$")
    sub.add_argument("args", nargs=6, metavar="j_or_m")
    sub.add_argument("--out")
    sub.add_argument("--tol", type=float)
    return parser


def _cmd_spectrum(args):
    state = _load_state(args.source, args.ssr)
    spec = states.spectrum(state)
    _emit(
        args,
        {
            "state": state.to_json(),
            "labels": list(spec.labels),
            "cardinality": spec.cardinality,
            "gapless": states.is_gapless(state),
            "resource": states.is_resource(state),
        },
    )


def _cmd_monotones(args):
    state = _load_state(args.source, args.ssr)
    _emit(args, {"state": state.to_json(), "monotones": monotones.report(state).to_json()})


def _cmd_det(args):
    source = _load_state(args.source, args.ssr)
    target = _load_state(args.target, args.ssr)
    _emit(args, singlecopy.det_feasible(source, target).to_json())


def _cmd_stoch(args):
    source = _load_state(args.source, args.ssr)
    target = _load_state(args.target, args.ssr)
    feasible, shifts = singlecopy.stoch_feasible(source, target)
    _emit(args, {"feasible": feasible, "shifts": shifts})


def _cmd_maxprob(args):
    source = _load_state(args.source, args.ssr)
    target = _load_state(args.target, args.ssr)
    _emit(args, singlecopy.max_prob(source, target).to_json())


def _cmd_ensemble_z2(args):
    source = _load_state(args.source, "z2")
    entries = _load_blob(args.targets)
    targets = [
        (float(e["weight"]), states.from_json(e["state"], "z2")) for e in entries
    ]
    channel = singlecopy.synthesize_ensemble_z2(source, targets)
    branches = channels.apply(channel, source)
    _emit(
        args,
        {
            "channel": channel.to_json(),
            "branches": [
                {"probability": w, "state": s.to_json()} for w, s in branches
            ],
        },
    )


def _rate_row(source_id, target_id, source, target, n):
    result = asymptotic.rate(source, target, evidence_n=n)
    ev = result.evidence or (None, None, None)
    return result, [
        source_id,
        target_id,
        "inf" if result.rate is not None and math.isinf(result.rate) else result.rate,
        result.reversible,
        ev[0],
        ev[1],
        ev[2],
    ]


def _cmd_rate(args):
    header = ["source_id", "target_id", "rate", "reversible", "N", "M", "fidelity"]
    if args.states:
        table = {
            key: states.from_json(value, args.ssr)
            for key, value in sorted(_load_blob(args.states).items())
        }
        payload = []
        rows = []
        for sid in sorted(table):
            for tid in sorted(table):
                if sid == tid:
                    continue
                result, row = _rate_row(sid, tid, table[sid], table[tid], args.N)
                rows.append(row)
                payload.append(
                    {"source_id": sid, "target_id": tid, **result.to_json()}
                )
        _emit(args, {"pairs": payload}, (header, rows))
        return
    source = _load_state(args.source, args.ssr)
    target = _load_state(args.target, args.ssr)
    result, row = _rate_row("source", "target", source, target, args.N)
    _emit(args, result.to_json(), (header, [row]))


def _cmd_verify_rate(args):
    source = _load_state(args.source, args.ssr)
    target = _load_state(args.target, args.ssr)
    n, m, fid, shift = asymptotic.verify_rate(
        source, target, args.N, args.M, window=args.window
    )
    _emit(args, {"N": n, "M": m, "fidelity": fid, "shift_used": shift})


def _cmd_tensor_power(args):
    state = _load_state(args.source, args.ssr)
    power = asymptotic.tensor_power(state, args.N, window=args.window)
    rows = [[label, power.weights[label]] for label in power.support()]
    _emit(args, {"N": args.N, "state": power.to_json()}, (["label", "weight"], rows))


def _cmd_apply_channel(args):
    state = _load_state(args.source, args.ssr)
    channel = channels.channel_from_json(_load_blob(args.channel))
    branches = channels.apply(channel, state)
    _emit(
        args,
        {"branches": [{"probability": w, "state": s.to_json()} for w, s in branches]},
    )


def _parse_matrix(data) -> np.ndarray:
    rows = []
    for row in data:
        entries = []
        for cell in row:
            if isinstance(cell, (list, tuple)):
                entries.append(complex(cell[0], cell[1]))
            else:
                entries.append(complex(cell))
        rows.append(entries)
    return np.array(rows, dtype=complex)


def _cmd_twirl(args):
    rho = _parse_matrix(_load_blob(args.matrix))
    out = channels.twirl(rho, args.ssr)
    _emit(
        args,
        {"matrix": [[[cell.real, cell.imag] for cell in row] for row in out]},
    )


def _cmd_audit(args):
    _emit(args, monotones.monotonicity_audit(args.ssr, args.trials, args.seed))


def _cmd_wigner3j(args):
    values = [HalfInt.coerce(token) for token in args.args]
    _emit(args, {"value": three_j(*values)})


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "monotones": _cmd_monotones,
    "det": _cmd_det,
    "stoch": _cmd_stoch,
    "maxprob": _cmd_maxprob,
    "ensemble-z2": _cmd_ensemble_z2,
    "rate": _cmd_rate,
    "verify-rate": _cmd_verify_rate,
    "tensor-power": _cmd_tensor_power,
    "apply-channel": _cmd_apply_channel,
    "twirl": _cmd_twirl,
    "audit": _cmd_audit,
    "wigner3j": _cmd_wigner3j,
}


def run(argv: list[str]) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "rate" and not (args.states or (args.source and args.target)):
        parser.error("rate needs --source and --target, or --states")
    if getattr(args, "tol", None):
        config.set_tolerance(args.tol)
    try:
        _HANDLERS[args.verb](args)
    except FramenessError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DOMAIN_EXIT
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return DOMAIN_EXIT
    return 0


def main() -> None:
    raise SystemExit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
