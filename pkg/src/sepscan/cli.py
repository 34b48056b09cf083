"""Command-line front end: one subcommand per pipeline, JSON reports on stdout.

Exit codes: 0 separable-assured (or a successful non-verdict command),
1 entangled, 2 unknown/unverified, 64 malformed input, 65 infeasible
configuration (net too coarse or too large, dimension guards), 70
internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__, onesided, states
from .core import DensityMatrix
from .nets import NetTooCoarseError, NetTooLargeError, build_net, verify_coverage
from .onesided import ENTANGLED, SEPARABLE, UNKNOWN, Verdict
from .qsep import bits_required, reduce_wmem_to_qsep, verify_certificate
from .serialize import (
    InputFormatError,
    density_from_json,
    dump_json,
    graph_from_json,
    load_json,
    matrix_from_json,
    matrix_to_json,
    qsep_certificate_from_json,
    qsep_instance_from_json,
    qsep_instance_to_json,
    rational_density_from_json,
)
from .symext import DimensionGuardError, separability_scan
from .witness import NumericalBreakdownError, wsep_solve
from .wopt import wopt_max

EXIT_SEPARABLE = 0
EXIT_ENTANGLED = 1
EXIT_UNKNOWN = 2
EXIT_BAD_INPUT = 64
EXIT_INFEASIBLE = 65
EXIT_NUMERICAL = 70


@dataclass
class RunConfig:
    command: str
    args: dict

    def to_json(self) -> dict:
        return {"command": self.command, **self.args, "version": __version__}


def _verdict_exit(verdict: Verdict) -> int:
    return {SEPARABLE: EXIT_SEPARABLE, ENTANGLED: EXIT_ENTANGLED, UNKNOWN: EXIT_UNKNOWN}[
        verdict.outcome
    ]


def _emit(report: dict, started: float) -> None:
    report["timings"] = {"total_s": round(time.time() - started, 6)}
    json.dump(report, sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


def _net_cache(args) -> str | None:
    return args.net_cache or os.environ.get("SEPSCAN_NET_CACHE") or None


def _load_state(path: str) -> DensityMatrix:
    return density_from_json(load_json(path))


def cmd_test(args, started: float) -> int:
    rho = _load_state(args.input)
    verdict = onesided.pipeline(rho, eig_tol=args.eig_tol, norm_tol=args.norm_tol)
    config = RunConfig(
        "test",
        {"input": args.input, "eig_tol": args.eig_tol, "norm_tol": args.norm_tol},
    )
    _emit({"config": config.to_json(), "verdict": verdict.to_json()}, started)
    return _verdict_exit(verdict)


def cmd_witness(args, started: float) -> int:
    rho = _load_state(args.input)
    net_delta = args.net_delta if args.net_delta is not None else args.delta / 10.0
    net = build_net(rho.m, net_delta, cache_dir=_net_cache(args))
    result = wsep_solve(rho, args.delta, net)
    report = {
        "config": RunConfig(
            "witness",
            {
                "input": args.input,
                "delta": args.delta,
                "net_delta": net_delta,
                "net_size": net.size,
                "net_method": net.method,
            },
        ).to_json(),
        "verdict": result.verdict.to_json(),
        "iterations": result.iterations,
    }
    if result.witness is not None:
        witness_json = {
            "operator": matrix_to_json(result.witness.operator),
            "bloch_sup_normalized": [float(x) for x in result.witness.sup_normalized_bloch()],
            "margin": result.witness.margin,
            "delta": result.witness.delta,
        }
        report["witness"] = witness_json
        if args.witness_out:
            dump_json(witness_json, args.witness_out)
            report["artifacts"] = {"witness": args.witness_out}
    _emit(report, started)
    return _verdict_exit(result.verdict)


def cmd_symext(args, started: float) -> int:
    rho = _load_state(args.input)
    confirm = None
    if args.strict:
        def confirm(state):
            net = build_net(state.m, args.delta / 10.0, cache_dir=_net_cache(args))
            return wsep_solve(state, args.delta, net).verdict.outcome == ENTANGLED

    verdict = separability_scan(
        rho,
        args.delta,
        kmax=args.kmax,
        ppt=args.ppt,
        max_iters=args.max_iters,
        tol=args.tol,
        strict_confirm=confirm,
    )
    report = {
        "config": RunConfig(
            "symext",
            {
                "input": args.input,
                "delta": args.delta,
                "kmax": args.kmax,
                "ppt": args.ppt,
                "max_iters": args.max_iters,
                "tol": args.tol,
                "strict": args.strict,
            },
        ).to_json(),
        "verdict": verdict.to_json(),
    }
    _emit(report, started)
    return _verdict_exit(verdict)


def cmd_wopt(args, started: float) -> int:
    obj = load_json(args.op)
    mat = matrix_from_json(obj["matrix"] if isinstance(obj, dict) else obj)
    if isinstance(obj, dict) and "m" in obj:
        m, n = int(obj["m"]), int(obj["n"])
    else:
        raise InputFormatError("operator JSON must carry m and n")
    hs = float(np.linalg.norm(mat))
    if hs < 1e-15:
        raise InputFormatError("zero operator")
    net = build_net(m, args.delta, cache_dir=_net_cache(args))
    res = wopt_max(mat / hs, m, n, net, mode=args.mode)
    report = {
        "config": RunConfig(
            "wopt",
            {
                "op": args.op,
                "delta": args.delta,
                "mode": args.mode,
                "net_size": net.size,
                "hs_norm": hs,
            },
        ).to_json(),
        "value_normalized": res.value,
        "value": res.value * hs,
        "guarantee": res.guarantee * hs,
        "maximizer": {
            "alpha": [[z.real, z.imag] for z in res.maximizer.alpha],
            "beta": [[z.real, z.imag] for z in res.maximizer.beta],
        },
    }
    _emit(report, started)
    return EXIT_SEPARABLE


def cmd_qsep_verify(args, started: float) -> int:
    inst = qsep_instance_from_json(load_json(args.instance))
    cert = qsep_certificate_from_json(load_json(args.cert))
    result = verify_certificate(inst, cert)
    report = {
        "config": RunConfig(
            "qsep-verify", {"instance": args.instance, "cert": args.cert}
        ).to_json(),
        "result": result.to_json(),
        "bits": bits_required(inst.delta_p),
    }
    _emit(report, started)
    return EXIT_SEPARABLE if result.accepted else EXIT_UNKNOWN


def cmd_qsep_reduce(args, started: float) -> int:
    mat, m, n = rational_density_from_json(load_json(args.input))
    delta = Fraction(args.delta)
    inst = reduce_wmem_to_qsep(mat, m, n, delta)
    inst_json = qsep_instance_to_json(inst)
    report = {
        "config": RunConfig("qsep-reduce", {"input": args.input, "delta": str(delta)}).to_json(),
        "instance": inst_json,
        "bits": bits_required(inst.delta_p),
    }
    if args.out:
        dump_json(inst_json, args.out)
        report["artifacts"] = {"instance": args.out}
    _emit(report, started)
    return EXIT_SEPARABLE


def cmd_gadget(args, started: float) -> int:
    from .gadgets import verify_chain

    graph = graph_from_json(load_json(args.graph))
    report_obj = verify_chain(graph, args.clique, net_delta=args.delta, seed=args.seed)
    report = {
        "config": RunConfig(
            "gadget",
            {"graph": args.graph, "clique": args.clique, "delta": args.delta, "seed": args.seed},
        ).to_json(),
        "chain": report_obj.to_json(),
    }
    _emit(report, started)
    return EXIT_SEPARABLE if report_obj.consistent else EXIT_UNKNOWN


def cmd_net(args, started: float) -> int:
    net = build_net(args.m, args.delta, cache_dir=_net_cache(args))
    coverage = verify_coverage(net, args.verify_samples, args.seed)
    report = {
        "config": RunConfig(
            "net",
            {
                "m": args.m,
                "delta": args.delta,
                "samples": args.verify_samples,
                "seed": args.seed,
            },
        ).to_json(),
        "size": net.size,
        "method": net.method,
        "projective": net.projective,
        "max_gap": coverage.max_gap,
        "passed": coverage.passed,
    }
    _emit(report, started)
    return EXIT_SEPARABLE if coverage.passed else EXIT_INFEASIBLE


def cmd_state(args, started: float) -> int:
    params = {}
    for kv in args.param or []:
        key, _, value = kv.partition("=")
        params[key] = value
    rho = states.library(args.name, **params)
    from .serialize import density_to_json

    obj = density_to_json(rho)
    if args.out:
        dump_json(obj, args.out)
    report = {
        "config": RunConfig("state", {"name": args.name, "params": params}).to_json(),
        "m": rho.m,
        "n": rho.n,
    }
    if args.out:
        report["artifacts"] = {"state": args.out}
    else:
        report["state"] = obj
    _emit(report, started)
    return EXIT_SEPARABLE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sepscan",
        description="Deterministic bipartite separability testing with certificates",
    )
    parser.add_argument("--threads", type=int, default=None, help="cap BLAS threads")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="run the one-sided test pipeline")
    p.add_argument("--input", required=True)
    p.add_argument("--eig-tol", type=float, default=onesided.EIG_TOL)
    p.add_argument("--norm-tol", type=float, default=onesided.NORM_TOL)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("witness", help="cutting-plane witness search")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--net-delta", type=float, default=None)
    p.add_argument("--net-cache", default=None)
    p.add_argument("--witness-out", default=None)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("symext", help="bounded symmetric-extension scan")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--ppt", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--max-iters", type=int, default=3000)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--net-cache", default=None)
    p.set_defaults(func=cmd_symext)

    p = sub.add_parser("wopt", help="weak optimization over the separable set")
    p.add_argument("--op", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--mode", choices=["signed", "abs"], default="signed")
    p.add_argument("--net-cache", default=None)
    p.set_defaults(func=cmd_wopt)

    p = sub.add_parser("qsep-verify", help="exact certificate verification")
    p.add_argument("--instance", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(func=cmd_qsep_verify)

    p = sub.add_parser("qsep-reduce", help="membership-to-certificate reduction")
    p.add_argument("--input", required=True)
    p.add_argument("--delta", required=True, help="rational, e.g. 1/2 or 0.25")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_qsep_reduce)

    p = sub.add_parser("gadget", help="clique reduction chain verification")
    p.add_argument("--graph", required=True)
    p.add_argument("--clique", type=int, required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("net", help="build and verify a sphere covering")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--net-cache", default=None)
    p.add_argument("--verify-samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_net)

    p = sub.add_parser("state", help="emit a library state as JSON")
    p.add_argument("--name", required=True)
    p.add_argument("--param", action="append", help="key=value, repeatable")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_state)

    return parser


def main(argv=None) -> int:
    started = time.time()
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads:
        try:
            from threadpoolctl import threadpool_limits

            threadpool_limits(args.threads)
        except ImportError:
            pass
    try:
        return args.func(args, started)
    except (InputFormatError,) as exc:
        json.dump({"error": str(exc), "kind": "input"}, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return EXIT_BAD_INPUT
    except (NetTooCoarseError, NetTooLargeError, DimensionGuardError) as exc:
        json.dump({"error": str(exc), "kind": "infeasible"}, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return EXIT_INFEASIBLE
    except (NumericalBreakdownError,) as exc:
        json.dump({"error": str(exc), "kind": "numerical"}, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return EXIT_NUMERICAL
    except ValueError as exc:
        json.dump({"error": str(exc), "kind": "input"}, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
