"""Command-line entry point: ``qnrbench <subcommand> ...``.

Subcommands read JSON/QASM from ``--in`` (default: standard input) and
write to ``--out`` (default: standard output), so they compose in pipes::

    qnrbench gen --prime 17 --reduced17 | qnrbench sim --shots 1000 --seed 7 \\
        | qnrbench score --prime 17

Exit codes: 0 success, 1 usage error, 2 domain error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import baseline, numtheory, qasm, sim, stats
from .circuit import Circuit, check
from .errors import InvalidArgumentError, QnrError
from .synth import build_fermat_circuit, build_general_circuit, build_qnr17_reduced, lower

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_input(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write_output(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text, encoding="utf-8")


def _load_circuit(path: str) -> Circuit:
    try:
        return check(Circuit.from_json(_read_input(path)))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"not a circuit JSON document: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=1)


# --------------------------------------------------------------------------- commands

def cmd_oracle(args) -> str:
    fast = numtheory.qnr_set(args.prime)
    if fast != numtheory.qnr_set_bruteforce(args.prime):
        raise InvalidArgumentError("Jacobi enumeration disagrees with brute force")  # pragma: no cover
    if args.format == "json":
        return _dump({"prime": args.prime, "qnrs": fast})
    if args.format == "csv":
        return "qnr\n" + "\n".join(map(str, fast))
    return " ".join(map(str, fast))


def cmd_angle(args) -> str:
    theta = numtheory.rotation_angle(args.prime)
    if args.format == "json":
        return _dump({"prime": args.prime, "n": numtheory.register_bits(args.prime), "theta": theta})
    if args.format == "csv":
        return f"prime,theta\n{args.prime},{theta:.17g}"
    return f"{theta:.10f}"


def cmd_gen(args) -> str:
    if args.reduced17:
        if args.prime != 17:
            raise InvalidArgumentError("--reduced17 only applies to --prime 17")
        circuit = build_qnr17_reduced()
    else:
        inst = numtheory.ProblemInstance.from_prime(args.prime)
        circuit = build_fermat_circuit(inst) if args.fermat else build_general_circuit(inst)
    return circuit.to_json()


def cmd_lower(args) -> str:
    return lower(_load_circuit(args.input), nearest_neighbor=args.nn).to_json()


def cmd_emit_qasm(args) -> str:
    return qasm.emit(_load_circuit(args.input))


def cmd_parse_qasm(args) -> str:
    return qasm.parse(_read_input(args.input)).to_json()


def cmd_sim(args) -> str:
    circuit = _load_circuit(args.input)
    register = circuit.register_qubits
    prime = None if circuit.instance is None else circuit.instance.p
    noise = sim.NoiseModel.parse(args.noise) if args.noise else sim.NoiseModel()
    if args.shots is None:
        if noise.kind != "none":
            raise InvalidArgumentError("--noise needs --shots")
        probs = sim.probabilities(sim.run(circuit), register)
        out = {sim.bitstring(i, len(register)): float(v) for i, v in enumerate(probs) if v > args.cutoff}
        if args.format == "csv":
            return "outcome,probability\n" + "\n".join(f"{k},{v:.6g}" for k, v in out.items())
        return _dump({"prime": prime, "probabilities": out})
    if noise.kind == "none":
        result = sim.sample(sim.run(circuit), args.shots, args.seed, register, prime)
    else:
        result = sim.run_noisy(circuit, noise, args.shots, args.seed, register)
    result.device = args.device
    result.timestamp = sim.now_iso() if args.timestamp == "now" else args.timestamp
    return result.to_json()


def cmd_baseline(args) -> str:
    p = args.prime
    exact = baseline.algorithm2_exact_success(p)
    report = {
        "prime": p,
        "algorithm2": {
            "exact_success": str(exact),
            "exact_success_float": float(exact),
            "trials": args.trials,
            "monte_carlo_success": baseline.algorithm2_monte_carlo(p, args.trials, args.seed),
        },
    }
    if args.advice is not None:
        rs = np.random.default_rng(args.seed).integers(1, p, size=args.trials)
        hist: dict[int, int] = {}
        for r in rs:
            v = baseline.algorithm4_sample(p, args.advice, r=int(r))
            hist[v] = hist.get(v, 0) + 1
        qnrs = set(numtheory.qnr_set(p))
        report["algorithm4"] = {
            "advice": args.advice,
            "trials": args.trials,
            "success_rate": sum(n for v, n in hist.items() if v in qnrs) / args.trials,
            "histogram": {str(k): hist[k] for k in sorted(hist)},
        }
    return _dump(report)


def cmd_score(args) -> str:
    result = sim.RunResult.from_json(_read_input(args.results))
    p = args.prime if args.prime is not None else result.prime
    if p is None:
        raise InvalidArgumentError("no prime given and the run file names none")
    rep = stats.score(result, p)
    if args.format == "csv":
        return stats.plot_data([(result.device, rep)])
    if args.format == "text":
        pv = "n/a" if rep.p_value is None else f"{rep.p_value:.6g}"
        return f"success_rate {rep.success_rate:.6g} k {rep.k} chi2 {rep.chi2} dof {rep.dof} p_value {pv}"
    return rep.to_json()


def cmd_plotdata(args) -> str:
    folder = Path(args.results)
    if not folder.is_dir():
        raise FileNotFoundError(f"{folder} is not a directory")
    reports = []
    for path in sorted(folder.glob("*.json")):
        result = sim.RunResult.from_json(path.read_text(encoding="utf-8"))
        p = args.prime if args.prime is not None else result.prime
        if p is None:
            raise InvalidArgumentError(f"{path.name}: no prime in file and none given")
        reports.append((result.device, stats.score(result, p)))
    return stats.plot_data(reports)


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--format", choices=("json", "csv", "text"), default=None)

    parser = _Parser(prog="qnrbench", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_text, default_format="json"):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(func=func, default_format=default_format)
        return p

    p = add("oracle", cmd_oracle, "list quadratic nonresidues", "text")
    p.add_argument("--prime", type=int, required=True)

    p = add("angle", cmd_angle, "rotation angle theta", "text")
    p.add_argument("--prime", type=int, required=True)

    p = add("gen", cmd_gen, "generate a benchmark circuit")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--fermat", action="store_true")
    p.add_argument("--reduced17", action="store_true")

    p = add("lower", cmd_lower, "lower to H/X/Phase/CNOT/CZ")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--nn", action="store_true", help="nearest-neighbour line topology")

    p = add("emit-qasm", cmd_emit_qasm, "circuit JSON to OpenQASM 2.0", "text")
    p.add_argument("--in", dest="input", default="-")

    p = add("parse-qasm", cmd_parse_qasm, "OpenQASM 2.0 to circuit JSON")
    p.add_argument("--in", dest="input", default="-")

    p = add("sim", cmd_sim, "simulate a circuit")
    p.add_argument("--in", dest="input", default="-")
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--noise", default=None, help="depolarizing:EPS or readout:EPS")
    p.add_argument("--device", default="simulator")
    p.add_argument("--timestamp", default=sim.EPOCH, help="ISO-8601 stamp, or 'now'")
    p.add_argument("--cutoff", type=float, default=1e-12, help="hide probabilities below this")

    p = add("baseline", cmd_baseline, "classical baseline statistics")
    p.add_argument("--prime", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--advice", type=int, default=None)

    p = add("score", cmd_score, "score a RunResult file")
    p.add_argument("--results", default="-")
    p.add_argument("--prime", type=int, default=None)

    p = add("plotdata", cmd_plotdata, "CSV for success-rate / p-value plots", "csv")
    p.add_argument("--results", required=True, help="directory of RunResult JSON files")
    p.add_argument("--prime", type=int, default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        if args.format is None:
            args.format = args.default_format
        if getattr(args, "shots", None) is not None and args.shots < 1:
            raise UsageError("--shots must be positive")
        if getattr(args, "trials", None) is not None and args.trials < 1:
            raise UsageError("--trials must be positive")
        text = args.func(args)
        _write_output(args, text)
    except UsageError as exc:
        print(f"qnrbench: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QnrError, ValueError) as exc:
        print(f"qnrbench: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"qnrbench: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
