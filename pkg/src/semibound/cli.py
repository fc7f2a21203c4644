"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 on domain or numerical
errors, 3 when ``verify`` finds a certification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Any, Sequence

from .apps.bundle import bundle_price_aggregate, bundle_price_improved, bundle_price_unequal
from .apps.inventory import inventory_solve, inventory_solve_aggregate
from .apps.option import option_quote
from .apps.spot_price import random_price_loss_upper
from .core import BoundReport, MomentSpec, ShiftedSpec
from .errors import SemiboundError
from .iid import (
    SumSpec,
    aggregate_abs_upper,
    aggregate_loss_upper,
    aggregate_tail_lower,
    improved_left_tail_lower,
    improved_tail_lower,
    percentile_envelope,
)
from .ingest import ingest_prices
from .loss import abs_sum_upper, optimal_loss_bound
from .tables import TableName, reproduce
from .verify import run_verification

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_CERT = 0, 1, 2, 3
SEED_ENV = "SEMIBOUND_SEED"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


class Output:
    """Rows for md/csv plus a JSON payload for the same result."""

    def __init__(self, header: Sequence[str], rows: Sequence[Sequence[Any]], payload: Any):
        self.header = list(header)
        self.rows = [list(r) for r in rows]
        self.payload = payload

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.payload) + "\n"
        cells = [[_fmt(c) for c in r] for r in self.rows]
        if fmt == "csv":
            buf = io.StringIO()
            writer = csv.writer(buf, lineterminator="\r\n")
            writer.writerow(self.header)
            writer.writerows(cells)
            return buf.getvalue()
        lines = ["| " + " | ".join(self.header) + " |", "|" + "|".join("---" for _ in self.header) + "|"]
        lines += ["| " + " | ".join(r) + " |" for r in cells]
        return "\n".join(lines) + "\n"


def _bounds_output(reports: Sequence[BoundReport]) -> Output:
    rows = [(r.method, r.kind.value, r.value) for r in reports]
    return Output(("method", "kind", "value"), rows, [r.as_dict() for r in reports])


def _need(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.command} requires {', '.join(missing)}")


def _spec(args: argparse.Namespace) -> MomentSpec:
    _need(args, "mu", "sigma")
    return MomentSpec(args.mu, args.sigma)


def _tail_reports(spec: MomentSpec, n: int, q: float) -> list[BoundReport]:
    s = SumSpec(spec, n, q)
    if s.per_item_gap > 0:
        return [aggregate_tail_lower(s), improved_tail_lower(s)]
    mirrored = SumSpec(MomentSpec(-spec.mean, spec.std_dev), n, -q)
    agg = aggregate_tail_lower(mirrored)
    agg = BoundReport(agg.value, agg.kind, "aggregate_left", s.inputs())
    return [agg, improved_left_tail_lower(s)]


def _sweep(args: argparse.Namespace, compute) -> Output:
    spec = _spec(args)
    rows, payload = [], []
    for n in range(1, args.sweep_n + 1):
        q = args.q * n if args.per_item else args.q
        reports = compute(spec, n, q)
        rows.append([n, q] + [r.value for r in reports])
        payload.append({"n": n, "q": q, "bounds": [r.as_dict() for r in reports]})
    header = ["N", "q"] + [r.method for r in reports]
    return Output(header, rows, payload)


def cmd_tail(args: argparse.Namespace) -> Output:
    if args.sweep_n:
        return _sweep(args, _tail_reports)
    q = args.q * args.n if args.per_item else args.q
    return _bounds_output(_tail_reports(_spec(args), args.n, q))


def _loss_reports(spec: MomentSpec, n: int, q: float) -> list[BoundReport]:
    s = SumSpec(spec, n, q)
    return [
        aggregate_loss_upper(s),
        optimal_loss_bound(ShiftedSpec(spec, q, n)),
        aggregate_abs_upper(s),
        abs_sum_upper(s),
    ]


def cmd_loss(args: argparse.Namespace) -> Output:
    if args.sweep_n:
        return _sweep(args, _loss_reports)
    q = args.q * args.n if args.per_item else args.q
    return _bounds_output(_loss_reports(_spec(args), args.n, q))


def cmd_percentile(args: argparse.Namespace) -> Output:
    env = percentile_envelope(_spec(args), args.n, args.gamma)
    payload = {
        "kind": "PercentileEnvelope",
        "method": "improved",
        "value": [env.lower, env.upper],
        "inputs": {"mu": args.mu, "sigma": args.sigma, "n": args.n, "gamma": args.gamma},
    }
    return Output(("gamma", "lower", "upper"), [(env.gamma, env.lower, env.upper)], payload)


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def cmd_bundle(args: argparse.Namespace) -> Output:
    if args.mus is not None or args.sigmas is not None:
        _need(args, "mus", "sigmas")
        mus, sigmas = _floats(args.mus), _floats(args.sigmas)
        if len(mus) != len(sigmas):
            raise UsageError("--mus and --sigmas need the same length")
        sols = [bundle_price_unequal([MomentSpec(m, s) for m, s in zip(mus, sigmas)])]
    else:
        spec = _spec(args)
        sols = [bundle_price_aggregate(spec, args.n), bundle_price_improved(spec, args.n)]
    rows = [(s.method.value, s.price_q, s.worst_case_profit, s.safety_factor_t) for s in sols]
    return Output(("method", "price", "worst_case_profit", "safety_factor"), rows, [s.as_dict() for s in sols])


def cmd_inventory(args: argparse.Namespace) -> Output:
    spec = _spec(args)
    sols = [
        ("Aggregate", inventory_solve_aggregate(spec, args.n, args.underage, args.overage)),
        ("Improved", inventory_solve(spec, args.n, args.underage, args.overage)),
    ]
    rows = [(name, s.order_q, s.worst_case_cost, "" if s.adverse_beta is None else s.adverse_beta) for name, s in sols]
    payload = [dict(method=name, **s.as_dict()) for name, s in sols]
    return Output(("method", "order_q", "worst_case_cost", "adverse_beta"), rows, payload)


def cmd_option(args: argparse.Namespace) -> Output:
    _need(args, "start", "strike")
    if args.prices:
        _, spec = ingest_prices(args.prices, args.date_column, args.close_column, args.population)
    else:
        spec = _spec(args)
    quote = option_quote(spec, args.n, args.start, args.strike, args.rate)
    p = quote.prices
    rows = [("Aggregation", p.aggregation), ("Improved", p.improved), ("Normal Prior", p.normal_prior), ("Lo", quote.lo_bound)]
    return Output(("method", "price"), rows, quote.as_dict())


def cmd_newsvendor_rp(args: argparse.Namespace) -> Output:
    _need(args, "price_mu", "demand_mu", "demand_sigma")
    price = MomentSpec(args.price_mu, args.price_sigma) if args.price_sigma else args.price_mu
    report = random_price_loss_upper(price, MomentSpec(args.demand_mu, args.demand_sigma), args.rho, args.q)
    out = _bounds_output([report])
    joint = report.attaining_distribution
    if joint is not None:
        out.rows += [("point", f"spot={s!r}", f"demand={d!r} prob={p!r}") for s, d, p in joint.points]
    return out


def cmd_reproduce(args: argparse.Namespace) -> Output:
    table = reproduce(TableName(args.table))
    if args.format == "md":
        return _Raw(table.render_markdown())
    if args.format == "csv":
        return _Raw(table.render_csv())
    return _Raw(json.dumps(table.as_dict()) + "\n")


class _Raw(Output):
    def __init__(self, text: str):
        super().__init__((), (), None)
        self.text = text

    def render(self, fmt: str) -> str:
        return self.text


def cmd_verify(args: argparse.Namespace) -> Output:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get(SEED_ENV, "0"))
    points = None
    if args.mu is not None or args.sigma is not None:
        spec = _spec(args)
        points = [(spec.mean, spec.std_dev, args.q)]
    summary = run_verification(args.n, seed, args.trials, points)
    out = Output(("check", "status", "detail"), [(c.name, "PASS" if c.passed else "FAIL", c.detail) for c in summary.checks],
                 {"seed": seed, "n": args.n, "passed": summary.passed, "checks": [c.as_dict() for c in summary.checks]})
    out.exit_code = EXIT_OK if summary.passed else EXIT_CERT
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mu", type=float, help="mean of each summand")
    common.add_argument("--sigma", type=float, help="standard deviation of each summand")
    common.add_argument("--n", type=int, default=1, help="number of iid summands")
    common.add_argument("--q", type=float, default=0.0, help="threshold on the sum")
    common.add_argument("--format", choices=("md", "csv", "json"), default="md")
    common.add_argument("--seed", type=int, default=None)

    parser = _Parser(prog="semibound", description="Mean-variance bounds for sums of independent variables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("tail", parents=[common], help="tail probability lower bounds")
    p.add_argument("--sweep-n", type=int, default=0, help="dump bounds for N = 1..K as a curve")
    p.add_argument("--per-item", action="store_true", help="treat --q as a per-item threshold")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("percentile", parents=[common], help="percentile envelope of the sum")
    p.add_argument("--gamma", type=float, default=0.5)
    p.set_defaults(func=cmd_percentile)

    p = sub.add_parser("loss", parents=[common], help="expected loss and absolute deviation bounds")
    p.add_argument("--sweep-n", type=int, default=0)
    p.add_argument("--per-item", action="store_true")
    p.set_defaults(func=cmd_loss)

    p = sub.add_parser("bundle", parents=[common], help="robust bundle price")
    p.add_argument("--mus", help="comma-separated means for items with unequal moments")
    p.add_argument("--sigmas", help="comma-separated standard deviations")
    p.set_defaults(func=cmd_bundle)

    p = sub.add_parser("inventory", parents=[common], help="risk-pooled order quantity")
    p.add_argument("--underage", type=float, required=True, help="cost per unit short (b)")
    p.add_argument("--overage", type=float, required=True, help="cost per unit left over (h)")
    p.set_defaults(func=cmd_inventory)

    p = sub.add_parser("option", parents=[common], help="European call price envelope")
    p.add_argument("--start", type=float, help="current price of the asset")
    p.add_argument("--strike", type=float)
    p.add_argument("--rate", type=float, default=0.0, help="daily risk-free rate")
    p.add_argument("--prices", help="CSV of historical closes to estimate daily moments from")
    p.add_argument("--date-column", default="date")
    p.add_argument("--close-column", default="close")
    p.add_argument("--population", action="store_true", help="population instead of sample std")
    p.set_defaults(func=cmd_option)

    p = sub.add_parser("newsvendor-rp", parents=[common], help="loss bound with a random spot price")
    p.add_argument("--price-mu", type=float)
    p.add_argument("--price-sigma", type=float, default=0.0)
    p.add_argument("--demand-mu", type=float)
    p.add_argument("--demand-sigma", type=float)
    p.add_argument("--rho", type=float, default=0.0)
    p.set_defaults(func=cmd_newsvendor_rp)

    p = sub.add_parser("reproduce", parents=[common], help="regenerate a benchmark table")
    p.add_argument("table", choices=[t.value for t in TableName])
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("verify", parents=[common], help="run the oracle certification suite")
    p.add_argument("--trials", type=int, default=1000)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.n < 1:
            parser.error("--n must be at least 1")
    except SystemExit as exc:  # --help exits 0, usage errors exit 1
        return int(exc.code or 0)
    try:
        out = args.func(args)
    except UsageError as exc:
        print(f"semibound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SemiboundError, ValueError, OverflowError, OSError) as exc:
        print(f"semibound: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    sys.stdout.write(out.render(args.format))
    return getattr(out, "exit_code", EXIT_OK)


if __name__ == "__main__":
    sys.exit(main())
