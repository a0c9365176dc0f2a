"""Command-line front end.

Exit codes: 0 success, 2 self-check failure, 64 usage error, 65 data error.
All matrices, channels and codes are read and written in the JSON encodings
of :mod:`qprecond.encoding`.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import channel_reps as cr
from . import holevo_semigroup as hs
from . import info_metrics as im
from .encoding import (
    channel_from_json,
    channel_to_json,
    code_from_json,
    code_to_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    stochastic_to_json,
)
from .errors import EncodingError, NotUnitaryError, QPrecondError
from .suite import RunConfig, format_records, run_suite
from .transform_unitaries import KINDS, transform_unitary

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive finite number, got {text}")
    return v


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # Global flags are accepted before or after the verb; the copies attached
    # to subcommands default to SUPPRESS so they never clobber earlier values.
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--tol", type=_positive_float, default=d(1e-9), help="tolerance (default 1e-9)")
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--trials", type=_positive_int, default=d(100), help="random trials per check (default 100)")
    p.add_argument("--max-dim", type=_positive_int, default=d(im.DEFAULT_MAX_DIM), help="largest composite dimension")
    p.add_argument("--out", default=d(None), help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qprecond", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    common = [_global_flags(True)]

    def verb(name, help_text):
        return sub.add_parser(name, help=help_text, parents=common)

    p = verb("unitary", "emit a transform unitary")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--n", type=_positive_int, required=True)

    p = verb("apply", "apply a channel to a matrix")
    p.add_argument("--channel", required=True)
    p.add_argument("--input", required=True, help="matrix file")

    p = verb("compose", "compose two channels (the second is applied first)")
    p.add_argument("outer")
    p.add_argument("inner")

    for name, text in (
        ("choi", "emit the Choi matrix"),
        ("kraus", "emit a Kraus form"),
        ("stinespring", "emit a Stinespring isometry"),
        ("verify", "check the channel axioms"),
        ("stochastic", "emit the stochastic matrix of a Holevo-form channel"),
        ("eb-check", "entanglement-breaking verdict"),
    ):
        p = verb(name, text)
        p.add_argument("--channel", required=True)

    p = verb("idempotent", "test idempotency")
    p.add_argument("--channel", required=True)
    p.add_argument("--method", choices=("operational", "holevo", "both"), default="operational")

    p = verb("ginverse", "probe generalized inverse identities")
    p.add_argument("--a", required=True)
    p.add_argument("--a-dagger", required=True)

    p = verb("rdc-check", "probe resource-destroying identities")
    p.add_argument("--delta", required=True)
    p.add_argument("--phi", required=True)

    p = verb("fidelity", "entanglement fidelity of a state through a channel")
    p.add_argument("--channel", required=True)
    p.add_argument("--state", required=True)

    p = verb("capacity", "capacity of P_U on C^J with a zero-error code")
    p.add_argument("--J", type=_positive_int, required=True)
    p.add_argument("--block-length", type=_positive_int, default=1)
    p.add_argument("--kind", choices=KINDS, default="fourier")
    p.add_argument("--scheme", choices=("product", "repetition"), default="product")
    p.add_argument("--no-code", action="store_true", help="omit the code from the output")

    p = verb("code-test", "error probability of a code through a channel")
    p.add_argument("--code", required=True)
    p.add_argument("--channel", help="channel file; defaults to the code file's 'channel' entry")

    p = verb("suite", "run the randomized invariant suite")
    p.add_argument("--only", action="append", help="restrict to checks with this name prefix")
    return parser


def _config(args) -> RunConfig:
    return RunConfig(tolerance=args.tol, seed=args.seed, trials=args.trials, memory_budget=args.max_dim)


def _channel(path: str):
    return channel_from_json(load_json(path))


def _matrix(path: str) -> np.ndarray:
    return matrix_from_json(load_json(path))


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _holevo(ch) -> cr.HolevoChannel:
    if isinstance(ch, cr.HolevoChannel):
        return ch
    if isinstance(ch, cr.PreconditionerChannel) and ch.is_rank_one:
        return cr.holevo_from_preconditioner(ch.U)
    raise EncodingError("this verb needs a Holevo channel or a rank-one preconditioner")


def _checks_json(report: dict) -> dict:
    return {k: {"name": c.name, "residual": float(c.residual), "tol": c.tol, "holds": bool(c.holds)} for k, c in report.items()}


def _run(args) -> tuple[str, int]:
    cfg = _config(args)
    tol = cfg.tolerance
    v = args.verb

    if v == "unitary":
        try:
            U = transform_unitary(args.kind, args.n, tol)
        except NotUnitaryError as exc:
            return _dump({"error": str(exc)}), EXIT_CHECK_FAILED
        return _dump(matrix_to_json(U)), EXIT_OK

    if v == "apply":
        return _dump(matrix_to_json(_channel(args.channel).apply(_matrix(args.input)))), EXIT_OK

    if v == "compose":
        outer, inner = _channel(args.outer), _channel(args.inner)
        if isinstance(outer, cr.HolevoChannel) and isinstance(inner, cr.HolevoChannel):
            return _dump(channel_to_json(cr.holevo_compose(outer, inner))), EXIT_OK
        return _dump(channel_to_json(cr.compose_kraus(cr.to_kraus(outer), cr.to_kraus(inner)))), EXIT_OK

    if v == "choi":
        return _dump(matrix_to_json(cr.choi_matrix(_channel(args.channel)).mat)), EXIT_OK

    if v == "kraus":
        return _dump(channel_to_json(cr.to_kraus(_channel(args.channel)))), EXIT_OK

    if v == "stinespring":
        return _dump(channel_to_json(cr.stinespring_isometry(cr.to_kraus(_channel(args.channel))))), EXIT_OK

    if v == "verify":
        report = cr.verify_channel_axioms(_channel(args.channel), tol=tol, seed=cfg.seed)
        text = "".join(_dump(r.as_dict()) for r in report.results)
        return text, EXIT_OK if report.passed else EXIT_CHECK_FAILED

    if v == "stochastic":
        return _dump(stochastic_to_json(hs.stochastic_of(_holevo(_channel(args.channel))))), EXIT_OK

    if v == "idempotent":
        ch = _channel(args.channel)
        out, code = {}, EXIT_OK
        if args.method in ("operational", "both"):
            r = hs.idempotency_residual(ch)
            out["operational"] = {"idempotent": bool(r <= tol), "residual": float(r), "tol": tol}
        if args.method in ("holevo", "both"):
            res = hs.is_idempotent_holevo(_holevo(ch), tol)
            out["holevo"] = {
                "applicable": res.applicable,
                "idempotent": None if res.idempotent is None else bool(res.idempotent),
                "residual": res.residual,
                "tol": tol,
                "reason": res.reason,
            }
            if res.worst_state is not None:
                out["holevo"]["worst_state"] = matrix_to_json(res.worst_state)
        if args.method == "both" and out["holevo"]["applicable"]:
            agree = out["holevo"]["idempotent"] == out["operational"]["idempotent"]
            out["agree"] = agree
            code = EXIT_OK if agree else EXIT_CHECK_FAILED
        return _dump(out), code

    if v == "ginverse":
        return _dump(_checks_json(hs.generalized_inverse_probe(_channel(args.a), _channel(args.a_dagger), tol))), EXIT_OK

    if v == "rdc-check":
        return _dump(_checks_json(hs.resource_destroying_check(_channel(args.delta), _channel(args.phi), tol))), EXIT_OK

    if v == "fidelity":
        fe = im.entanglement_fidelity(_matrix(args.state), _channel(args.channel), tol)
        return _dump({"entanglement_fidelity": fe}), EXIT_OK

    if v == "eb-check":
        ch = _channel(args.channel)
        out = {"verdict": im.eb_classification(ch, tol)}
        if isinstance(ch, cr.PreconditionerChannel):
            out["cq_structure"] = im.cq_structure_test(ch)
        return _dump(out), EXIT_OK

    if v == "capacity":
        w = im.capacity_witness(args.J, args.block_length, args.kind, args.scheme, cfg.memory_budget)
        out = w.as_dict()
        if not args.no_code:
            out["code"] = code_to_json(im.capacity_code(transform_unitary(args.kind, args.J), args.block_length, scheme=args.scheme))
        ok = w.error_probability <= 1e-12
        return _dump(out), EXIT_OK if ok else EXIT_CHECK_FAILED

    if v == "code-test":
        obj = load_json(args.code)
        code = code_from_json(obj)
        if args.channel:
            ch = _channel(args.channel)
        elif isinstance(obj, dict) and "channel" in obj:
            ch = channel_from_json(obj["channel"])
        else:
            raise EncodingError("no channel given: pass --channel or add a 'channel' entry to the code file")
        kraus = cr.to_kraus(ch)
        pe = im.code_error_probability(kraus, code, cfg.memory_budget)
        return _dump({"block_length": code.block_length, "size": code.size, "rate": code.rate, "error_probability": pe}), EXIT_OK

    if v == "suite":
        records = run_suite(cfg, args.only)
        return format_records(records), EXIT_OK if all(r.passed for r in records) else EXIT_CHECK_FAILED

    raise UsageError(f"unknown verb {v!r}")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = _run(args)
    except UsageError as exc:
        print(f"qprecond: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QPrecondError, ValueError, OSError, MemoryError) as exc:
        print(f"qprecond: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qprecond: error: {exc}", file=sys.stderr)
            return EXIT_DATA
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
