"""Command-line front end. Standard output carries JSON only."""

from __future__ import annotations

import argparse
import json
import sys

from .certificate import certificate_from_json, verify_dual_certificate
from .errors import InvariantBreach, Malformed, TooLarge
from .harness import run
from .model import (
    Approximation,
    allocation_from_json,
    dumps,
    generate_instance,
    load_instance,
    parse_rational,
)
from .oracle import exact_opt
from .solver import decide, verify_allocation

EXIT_MALFORMED = 1
EXIT_TOO_LARGE = 2
EXIT_BREACH = 3
EXIT_REJECTED = 4


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise Malformed("json", f"{path}: {exc}") from exc


def _write(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def cmd_solve(args):
    instance = load_instance(args.instance)
    approx = Approximation.parse(args.epsilon)
    result, report = run(instance, approx, jobs=args.jobs)
    sys.stdout.write(dumps(result.allocation.to_json(instance, result.T_star, approx)))
    if args.report:
        _write(args.report, dumps(report.to_json()))
    return 0


def cmd_decide(args):
    instance = load_instance(args.instance)
    approx = Approximation.parse(args.epsilon)
    outcome = decide(instance, args.T, approx)
    sys.stdout.write(dumps(outcome.to_json(instance, approx)))
    if not outcome.success and args.cert:
        _write(args.cert, dumps(outcome.certificate.to_json(instance)))
    return 0


def cmd_oracle(args):
    instance = load_instance(args.instance)
    opt = exact_opt(instance, max_resources=args.max_r, max_players=args.max_p)
    sys.stdout.write(dumps({"opt": opt}))
    return 0


def cmd_gen(args):
    instance = generate_instance(
        args.seed, args.players, args.resources, args.max_value, parse_rational(args.density)
    )
    text = instance.dumps()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify_alloc(args):
    instance = load_instance(args.instance)
    approx = Approximation.parse(args.epsilon)
    allocation = allocation_from_json(instance, _read_json(args.allocation))
    ok = verify_allocation(instance, allocation, args.T, approx)
    sys.stdout.write(dumps({"valid": ok}))
    return 0 if ok else EXIT_REJECTED


def cmd_verify_cert(args):
    instance = load_instance(args.instance)
    cert = certificate_from_json(instance, _read_json(args.certificate))
    ok = verify_dual_certificate(instance, cert, max_resources=args.max_r)
    sys.stdout.write(dumps({"valid": ok}))
    return 0 if ok else EXIT_REJECTED


def cmd_trace(args):
    instance = load_instance(args.instance)
    approx = Approximation.parse(args.epsilon)

    def sink(event):
        sys.stdout.write(json.dumps(event) + "\n")

    decide(instance, args.T, approx, trace=sink)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="restricted-santa",
        description="Local-search solver for restricted max-min fair allocation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="binary search for the best T and print the allocation")
    p.add_argument("instance")
    p.add_argument("--epsilon", default="1/1")
    p.add_argument("--report", help="write a run report to this path")
    p.add_argument("--jobs", type=int, default=None, help="decide every T in parallel first")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("decide", help="run the decision procedure at one T")
    p.add_argument("instance")
    p.add_argument("--T", type=_nonneg_int, required=True)
    p.add_argument("--epsilon", default="1/1")
    p.add_argument("--cert", help="write the dual certificate here on failure")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("oracle", help="exact optimum by exhaustive search")
    p.add_argument("instance")
    p.add_argument("--max-r", type=int, default=14)
    p.add_argument("--max-p", type=int, default=5)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="seeded random instance")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--players", type=int, required=True)
    p.add_argument("--resources", type=int, required=True)
    p.add_argument("--max-value", type=int, required=True)
    p.add_argument("--density", default="1/2")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify-alloc", help="check an allocation against T/alpha")
    p.add_argument("instance")
    p.add_argument("allocation")
    p.add_argument("--T", type=_nonneg_int, required=True)
    p.add_argument("--epsilon", default="1/1")
    p.set_defaults(func=cmd_verify_alloc)

    p = sub.add_parser("verify-cert", help="brute-force check of a dual certificate")
    p.add_argument("instance")
    p.add_argument("certificate")
    p.add_argument("--max-r", type=int, default=20)
    p.set_defaults(func=cmd_verify_cert)

    p = sub.add_parser("trace", help="JSON Lines event stream of one decide run")
    p.add_argument("instance")
    p.add_argument("--T", type=_nonneg_int, required=True)
    p.add_argument("--epsilon", default="1/1")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (Malformed, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except TooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except InvariantBreach as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_BREACH


if __name__ == "__main__":
    sys.exit(main())
