"""Command line: ``sasaki-mmp {hj,resolve,mmp,flow,local-model} ...``.

Exit codes: 0 success, 1 validation failure, 2 engine error, 3 parse error.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .engine import FlowState, flow_class, run_mmp, transverse_volume
from .errors import EngineError, ManifestError, ValidationError
from .hj import CyclicQuotientType, classify_singularity, discrepancies, hj_expand
from .local_model import run_suite
from .manifest import parse_manifest
from .qmath import fmt_q, fmt_vec, parse_rational
from .topology import replay

EXIT_OK, EXIT_INVALID, EXIT_ENGINE, EXIT_PARSE = 0, 1, 2, 3
SEED_ENV = "SASAKI_MMP_SEED"


@dataclass
class CommandResult:
    exit_code: int
    lines: list[str] = field(default_factory=list)

    @property
    def text(self) -> str:
        return "".join(line + "\n" for line in self.lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ManifestError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sasaki-mmp", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    hj = sub.add_parser("hj", help="continued fraction, discrepancies and class of 1/r(1,a)")
    hj.add_argument("fraction", help="r/a")
    res = sub.add_parser("resolve", help="resolution chains of every singular fibre")
    res.add_argument("file", type=Path)
    mmp = sub.add_parser("mmp", help="run the minimal model program with scaling")
    mmp.add_argument("file", type=Path)
    mmp.add_argument("--trace", action="store_true", help="print nef certificates per step")
    flow = sub.add_parser("flow", help="flow class and transverse volume at time t")
    flow.add_argument("file", type=Path)
    flow.add_argument("--t", required=True, help="flow time p/q")
    lm = sub.add_parser("local-model", help="numerical checks of the S(-k) local model")
    lm.add_argument("--k", type=int, required=True)
    lm.add_argument("--samples", type=int, default=10_000)
    lm.add_argument("--seed", type=int, default=0)
    lm.add_argument("--workers", type=int, default=1)
    return p


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read {path}: {exc.strerror}") from None
    return parse_manifest(text)


def _disc_text(values) -> str:
    return "[" + ",".join(str(x) for x in values) + "]"


def _cmd_hj(args) -> list[str]:
    q = parse_rational(args.fraction)
    sing = CyclicQuotientType(q.numerator, q.denominator)
    chain = hj_expand(sing)
    disc = discrepancies(chain) if len(chain) else ()
    return [f"chain={chain} disc={_disc_text(disc)} class={classify_singularity(disc)}"]


def _cmd_resolve(args) -> list[str]:
    model, _ = _load(args.file)
    lines, klt = [], True
    for sid, sing in sorted(model.sings):
        chain = hj_expand(sing)
        disc = discrepancies(chain)
        cls = classify_singularity(disc)
        klt = klt and all(a > -1 for a in disc)
        lines.append(f"{sid}\t{sing}\tchain={chain}\tdisc={_disc_text(disc)}\tclass={cls}")
    lines.append(f"klt\t{'yes' if klt else 'no'}")
    return lines


def _cmd_mmp(args) -> list[str]:
    model, topo = _load(args.file)
    log = run_mmp(FlowState(model))
    _, end = replay(topo, log)
    return log.lines(trace=args.trace) + [f"end\t{end}"]


def _cmd_flow(args) -> list[str]:
    model, _ = _load(args.file)
    t = parse_rational(args.t)
    state = FlowState(model)
    return [f"flow_class\t{fmt_vec(flow_class(state, t))}", f"volume\t{fmt_q(transverse_volume(state, t))}"]


def _cmd_local_model(args) -> tuple[int, list[str]]:
    seed = args.seed
    if os.environ.get(SEED_ENV):
        try:
            seed = int(os.environ[SEED_ENV])
        except ValueError:
            raise ManifestError(f"{SEED_ENV} must be an integer") from None
    results = run_suite(args.k, args.samples, seed, workers=args.workers)
    lines = [f"local-model\tk={args.k}\tsamples={args.samples}\tseed={seed}"]
    lines += [r.format() for r in results]
    return (EXIT_OK if all(r.passed for r in results) else EXIT_INVALID), lines


def dispatch(argv) -> CommandResult:
    try:
        args = _parser().parse_args(list(argv))
        if args.command == "local-model":
            return CommandResult(*_cmd_local_model(args))
        handler = {"hj": _cmd_hj, "resolve": _cmd_resolve, "mmp": _cmd_mmp, "flow": _cmd_flow}[args.command]
        return CommandResult(EXIT_OK, handler(args))
    except ManifestError as exc:
        return CommandResult(EXIT_PARSE, [f"parse error: {exc}"])
    except ValidationError as exc:
        return CommandResult(EXIT_INVALID, [f"invalid: {line}" for line in exc.report])
    except (EngineError, ValueError) as exc:
        return CommandResult(EXIT_ENGINE, [f"error: {exc}"])


def main(argv=None) -> int:
    result = dispatch(sys.argv[1:] if argv is None else argv)
    stream = sys.stdout if result.exit_code == EXIT_OK else sys.stderr
    stream.buffer.write(result.text.encode("utf-8"))
    stream.flush()
    return result.exit_code
