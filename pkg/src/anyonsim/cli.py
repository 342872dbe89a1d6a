"""Command-line front end.

Every subcommand prints one JSON envelope (``tool_version``, ``subcommand``,
``parameters``, ``seed``, ``results``, ``wall_time_ms``) on success, or a
diagnostic on standard error.  Exit codes: 0 success, 2 bad input, 1
numerical failure.  Complex numbers are written as ``[re, im]``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .braid import abelian_rep, check_relations, parse_word, word_unitary
from .errors import InputError, NumericalError

DEFAULT_SEED = 0


class UsageError(InputError):
    pass


class _Parser(argparse.ArgumentParser):
    """Raises instead of exiting, so ``run`` owns every exit code."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def emit_plot_data(columns: Sequence[str], rows, path: Optional[str] = None) -> str:
    """Write ``rows`` as CSV with a header (UTF-8, LF line endings); returns the text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# ----------------------------------------------------------------- commands
#
# Each handler returns (results, csv) where csv is None or (columns, rows).


def _cmd_relations(a):
    if a.rep == "ising":
        from .ising import build_algebra, ising_rep

        rep = ising_rep(build_algebra(a.anyons))
    elif a.rep == "fibonacci":
        from .fibonacci import fibonacci_rep, parse_charge

        rep = fibonacci_rep(a.anyons, parse_charge(a.charge))
    else:
        rep = abelian_rep(a.theta, a.anyons)
    report = check_relations(rep, a.tol)
    return {"representation": rep.name, "dim": rep.dim, **report.to_dict()}, None


def _cmd_ising_braid(a):
    from .ising import build_algebra, ising_rep, logical_encoding

    alg = build_algebra(a.majoranas)
    w = parse_word(a.word, a.majoranas)
    u = word_unitary(ising_rep(alg), w)
    psi = u @ alg.vacuum()
    out = {"word": list(w.letters), "unitary": u, "state": psi}
    if a.majoranas == 4:
        out["logical_block"] = logical_encoding(alg).restrict(u)
    return out, None


def _cmd_ising_fuse(a):
    from .ising import braid_then_fuse, parse_pairing

    w = parse_word(a.word, a.majoranas)
    dist = braid_then_fuse(w, parse_pairing(a.pairing), shots=a.shots, seed=a.seed, n_majoranas=a.majoranas)
    return dist.to_json(), None


def _cmd_fib_basis(a):
    from .fibonacci import basis_counts, enumerate_basis, parse_charge

    basis = enumerate_basis(a.anyons, parse_charge(a.charge))
    z, o = basis_counts(a.anyons)
    res = {"n_paths": len(basis), "paths": basis.labels(), "counts_vacuum_tau": [z, o]}
    return res, (["index", "path"], list(enumerate(basis.labels())))


def _cmd_fib_braid(a):
    from .fibonacci import enumerate_basis, fibonacci_rep, parse_charge

    charge = parse_charge(a.charge)
    rep = fibonacci_rep(a.anyons, charge)
    u = word_unitary(rep, parse_word(a.word, a.anyons))
    res = {"basis": enumerate_basis(a.anyons, charge).labels(), "unitary": u}
    if a.anyons == 3 and charge is None:
        from .fibonacci import composite_loop_check, qubit_gates

        gates = qubit_gates()
        res["u_gate"] = gates["u_gate"]
        res["v_gate"] = gates["v_gate"]
        for key in ("u_axis_angle", "v_axis_angle"):
            aa = gates[key]
            res[key] = {"axis": aa.axis, "angle_deg": float(np.degrees(aa.angle)), "phase": aa.phase}
        res["composite_loop"] = {f"{p[0]}{p[1]}": w for p, w in composite_loop_check().items()}
    return res, None


def _cmd_compile_weave(a):
    from .compiler import (
        SearchBudget,
        WeaveCache,
        compile_cached,
        control_blocks,
        controlled_gate,
        distance,
        named_target,
        u4_reference,
    )

    budget = SearchBudget(a.max_moves, a.target_distance, a.workers)
    cache = WeaveCache(a.cache) if a.cache else None
    result = compile_cached(named_target(a.target), budget, a.target, cache)
    res = result.to_json()
    if a.target == "B1^4":
        gate = controlled_gate(result.weave)
        _, b1 = control_blocks(gate)
        res["controlled_gate"] = gate
        res["control_tau_block_distance_to_u4"] = distance(b1, u4_reference())
    return res, None


def _cmd_berry_exchange(a):
    from .berry import CouplingPath, KatoConfig, evolve_path, exchange_holonomy, ground_block

    if a.path:
        try:
            with open(a.path, encoding="utf-8") as fh:
                spec = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read path file: {exc}") from None
        path = CouplingPath.from_json(spec)
        steps = int(spec.get("steps_per_leg", a.steps))
        u = evolve_path(path, KatoConfig(steps), a.mirror)
        blk = ground_block(u, path.start_vector(), path.end_vector(), a.mirror)
        return {**path.to_json(steps), "closed": path.is_closed, "unitary": u, "ground_block": blk}, None
    res = exchange_holonomy(KatoConfig(a.steps), a.mirror)
    return {"mirror": a.mirror, **res.to_json()}, None


def _cmd_bdg_spectrum(a):
    from .bdg import ChainSpec, chain_spectrum

    r = chain_spectrum(ChainSpec(a.sites, a.t, a.delta, a.mu))
    return r.to_json(), (["index", "energy"], list(enumerate(r.eigenvalues)))


def _parse_lengths(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ValueError
            return list(range(*parts))
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"lengths must be 'start:stop:step' or a comma list, got {text!r}") from None


def _cmd_bdg_splitting(a):
    from .bdg import ChainSpec, splitting_scan

    lengths = _parse_lengths(a.lengths)
    columns = ["d", "epsilon", "ln_epsilon_envelope"]
    if not lengths:
        return {"d": [], "epsilon": [], "ln_epsilon_envelope": []}, (columns, [])
    r = splitting_scan(ChainSpec(4, a.t, a.delta, a.mu_bar), lengths, a.trivial_sites, a.window, a.workers)
    return r.to_json(), (columns, r.rows())


def _cmd_jr_zero_mode(a):
    from .bdg import MassProfile, jr_zero_mode

    prof = MassProfile.tanh(a.m_bar, a.width, a.half_length, a.spacing)
    z = jr_zero_mode(prof, a.v_f)
    res = {
        "residual": z.residual,
        "spinor": z.spinor[int(np.argmax(z.density))] / np.sqrt(z.density.max()),
        "peak_x": float(z.x[int(np.argmax(z.density))]),
        "n_points": int(z.x.size),
    }
    return res, (["x", "density"], list(zip(z.x, z.density)))


# ----------------------------------------------------------------- parser


def _common(default) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    p.add_argument("--seed", type=int, default=default, help="seed for sampled outputs (default 0)")
    p.add_argument("--output", default=default, help="write the output here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=default)
    return p


COMMANDS: dict[str, tuple[Callable, str]] = {
    "relations": (_cmd_relations, "check far commutation and Yang-Baxter for a braid representation"),
    "ising-braid": (_cmd_ising_braid, "Majorana (Ising) braid unitary of a word acting on the vacuum"),
    "ising-fuse": (_cmd_ising_fuse, "fusion statistics after braiding pairs created from the vacuum"),
    "fib-basis": (_cmd_fib_basis, "Fibonacci fusion-path basis and its Fibonacci-number counting"),
    "fib-braid": (_cmd_fib_braid, "Fibonacci braid unitary; on 3 anyons also the qubit gates and composite loop"),
    "compile-weave": (_cmd_compile_weave, "weave search for a 3-anyon target and the controlled gate it yields"),
    "berry-exchange": (_cmd_berry_exchange, "adiabatic (Kato) transport around the Y-junction exchange path"),
    "bdg-spectrum": (_cmd_bdg_spectrum, "BdG spectrum of a Kitaev chain with its near-zero end modes"),
    "bdg-splitting": (_cmd_bdg_splitting, "zero-mode splitting versus topological length with exponential fit"),
    "jr-zero-mode": (_cmd_jr_zero_mode, "domain-wall bound state of the Dirac model with residual check"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anyonsim", description=__doc__.splitlines()[0], parents=[_common(None)],
                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    common = _common(argparse.SUPPRESS)

    def add(name):
        func, text = COMMANDS[name]
        p = sub.add_parser(name, help=text, description=text, parents=[common], allow_abbrev=False)
        p.set_defaults(_func=func)
        return p

    p = add("relations")
    p.add_argument("--rep", choices=("ising", "fibonacci", "abelian"), required=True)
    p.add_argument("--anyons", type=int, required=True, help="strands (Majoranas for ising)")
    p.add_argument("--charge", default=None, help="fibonacci total charge: 0 or tau")
    p.add_argument("--theta", type=float, default=np.pi / 4, help="abelian exchange phase")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("ising-braid")
    p.add_argument("--word", required=True, help='e.g. "2 1 -2"')
    p.add_argument("--majoranas", type=int, default=4)

    p = add("ising-fuse")
    p.add_argument("--word", required=True)
    p.add_argument("--pairing", required=True, help='e.g. "(1,3)(2,4)", labels as created')
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--majoranas", type=int, default=4)

    p = add("fib-basis")
    p.add_argument("--anyons", type=int, required=True)
    p.add_argument("--charge", default=None)

    p = add("fib-braid")
    p.add_argument("--anyons", type=int, required=True)
    p.add_argument("--word", default="")
    p.add_argument("--charge", default=None)

    p = add("compile-weave")
    p.add_argument("--target", default="B1^4", choices=("B1^4", "B1^2", "identity"))
    p.add_argument("--max-moves", type=int, default=12)
    p.add_argument("--target-distance", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache", default=None, help="JSON cache file for search results")

    p = add("berry-exchange")
    p.add_argument("--steps", type=int, default=1000, help="steps per leg")
    p.add_argument("--mirror", action="store_true", help="mirror-image junction")
    p.add_argument("--path", default=None, help="JSON coupling path instead of the exchange")

    p = add("bdg-spectrum")
    p.add_argument("--sites", type=int, default=200)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--mu", type=float, default=1.0)

    p = add("bdg-splitting")
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--mu-bar", type=float, default=0.05)
    p.add_argument("--lengths", default="20:241:20", help="start:stop:step or comma list")
    p.add_argument("--trivial-sites", type=int, default=60)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)

    p = add("jr-zero-mode")
    p.add_argument("--m-bar", type=float, default=1.0)
    p.add_argument("--width", type=float, default=1.0)
    p.add_argument("--v-f", type=float, default=1.0)
    p.add_argument("--half-length", type=float, default=20.0)
    p.add_argument("--spacing", type=float, default=0.01)
    return parser


_GLOBAL = ("seed", "output", "format", "subcommand", "_func")


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.seed is None:
        args.seed = DEFAULT_SEED
    fmt = args.format or "json"
    params = {k: v for k, v in vars(args).items() if k not in _GLOBAL}

    start = time.perf_counter()
    try:
        results, table = args._func(args)
        if fmt == "csv" and table is None:
            raise UsageError(f"{args.subcommand} has no CSV output")
    except InputError as exc:
        print(f"anyonsim {args.subcommand}: {exc}", file=stderr)
        return 2
    except NumericalError as exc:
        print(f"anyonsim {args.subcommand}: numerical failure: {exc}", file=stderr)
        return 1
    elapsed = (time.perf_counter() - start) * 1e3

    if fmt == "csv":
        text = emit_plot_data(*table)
    else:
        envelope = {
            "tool_version": __version__,
            "subcommand": args.subcommand,
            "parameters": params,
            "seed": args.seed,
            "results": results,
            "wall_time_ms": round(elapsed, 3),
        }
        text = json.dumps(to_jsonable(envelope), indent=1) + "\n"
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as exc:
        print(f"anyonsim: cannot write output: {exc}", file=stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
