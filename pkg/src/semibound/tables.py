"""Tabulated benchmark runs, computed at full precision and rounded on render."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal
from enum import Enum

from .apps.bundle import bundle_price_aggregate, bundle_price_improved
from .apps.inventory import inventory_solve, inventory_solve_aggregate
from .apps.option import option_quote
from .apps.spot_price import random_price_loss_upper, random_price_worst_case
from .core import MomentSpec

BENCH_NS = (1, 2, 3, 4, 5, 10, 20)
OPTION_NS = (10, 30, 60, 100, 200)
BENCH_SPEC = MomentSpec(2.5, 1.0)
UNDERAGE, OVERAGE = 4.0, 1.0
NAB_SPEC = MomentSpec(0.0194, 0.2752)
NAB_START, NAB_STRIKE = 26.26, 28.8
SPOT_PRICE = MomentSpec(12.0, 3.0)
SPOT_DEMAND = MomentSpec(10.0, 4.0)
SPOT_RHO, SPOT_Q = 0.2, 13.0


class TableName(Enum):
    TABLE2 = "table2"
    TABLE4 = "table4"
    TABLE5 = "table5"
    APPENDIXB = "appendixb"


@dataclass(frozen=True)
class Cell:
    value: float | int | str
    fmt: str = "f3"

    def render(self) -> str:
        if self.fmt == "str":
            return str(self.value)
        if self.fmt == "int":
            return str(int(self.value))
        if self.fmt == "pct1":
            return f"{_round(100.0 * float(self.value), '0.1')}%"
        if self.fmt == "f4":
            return str(_round(float(self.value), "0.0001"))
        return str(_round(float(self.value), "0.001"))


def _round(x: float, quantum: str) -> Decimal:
    out = Decimal(repr(x)).quantize(Decimal(quantum), rounding=ROUND_HALF_EVEN)
    return out + 0 if out != 0 else abs(out)


@dataclass(frozen=True)
class TableArtifact:
    name: TableName
    header: tuple[str, ...]
    rows: tuple[tuple[Cell, ...], ...]

    def rendered_rows(self) -> list[list[str]]:
        return [[c.render() for c in row] for row in self.rows]

    def render_markdown(self) -> str:
        lines = ["| " + " | ".join(self.header) + " |", "|" + "|".join("---" for _ in self.header) + "|"]
        lines += ["| " + " | ".join(r) + " |" for r in self.rendered_rows()]
        return "\n".join(lines) + "\n"

    def render_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        writer.writerow(self.header)
        writer.writerows(self.rendered_rows())
        return buf.getvalue()

    def as_dict(self) -> dict:
        return {
            "name": self.name.value,
            "header": list(self.header),
            "rows": [[c.value for c in row] for row in self.rows],
        }


def _gap(aggregate: float, improved: float) -> float:
    return abs(aggregate - improved) / improved


def table2() -> TableArtifact:
    rows = []
    for n in BENCH_NS:
        agg = bundle_price_aggregate(BENCH_SPEC, n)
        imp = bundle_price_improved(BENCH_SPEC, n)
        rows.append((
            Cell(n, "int"),
            Cell(agg.price_q),
            Cell(agg.worst_case_profit),
            Cell(imp.price_q),
            Cell(imp.worst_case_profit),
            Cell(_gap(agg.price_q, imp.price_q), "pct1"),
            Cell(_gap(agg.worst_case_profit, imp.worst_case_profit), "pct1"),
        ))
    header = ("N", "q_aggregate", "T_aggregate", "q_improved", "T_improved", "gap_q", "gap_T")
    return TableArtifact(TableName.TABLE2, header, tuple(rows))


def table4() -> TableArtifact:
    rows = []
    for n in BENCH_NS:
        agg = inventory_solve_aggregate(BENCH_SPEC, n, UNDERAGE, OVERAGE)
        imp = inventory_solve(BENCH_SPEC, n, UNDERAGE, OVERAGE)
        rows.append((
            Cell(n, "int"),
            Cell(agg.order_q),
            Cell(agg.worst_case_cost),
            Cell(imp.order_q),
            Cell(imp.worst_case_cost),
            Cell(_gap(agg.order_q, imp.order_q), "pct1"),
            Cell(_gap(agg.worst_case_cost, imp.worst_case_cost), "pct1"),
        ))
    header = ("N", "q_aggregate", "T_aggregate", "q_improved", "T_improved", "gap_q", "gap_T")
    return TableArtifact(TableName.TABLE4, header, tuple(rows))


def table5() -> TableArtifact:
    quotes = [option_quote(NAB_SPEC, n, NAB_START, NAB_STRIKE, 0.0) for n in OPTION_NS]
    rows = (
        (Cell("Aggregation", "str"),) + tuple(Cell(q.prices.aggregation) for q in quotes),
        (Cell("Improved", "str"),) + tuple(Cell(q.prices.improved) for q in quotes),
        (Cell("Normal Prior", "str"),) + tuple(Cell(q.prices.normal_prior) for q in quotes),
    )
    header = ("method",) + tuple(f"N={n}" for n in OPTION_NS)
    return TableArtifact(TableName.TABLE5, header, rows)


def appendix_b() -> TableArtifact:
    joint = random_price_worst_case(SPOT_PRICE, SPOT_DEMAND, SPOT_RHO, SPOT_Q)
    bound = random_price_loss_upper(SPOT_PRICE, SPOT_DEMAND, SPOT_RHO, SPOT_Q).value
    rows = tuple((Cell(s), Cell(d), Cell(p)) for s, d, p in joint.points)
    rows += ((Cell("k", "str"), Cell(joint.k_ratio, "f4"), Cell("", "str")),)
    rows += ((Cell("bound", "str"), Cell(bound), Cell("", "str")),)
    return TableArtifact(TableName.APPENDIXB, ("spot_price", "demand", "prob"), rows)


BUILDERS = {
    TableName.TABLE2: table2,
    TableName.TABLE4: table4,
    TableName.TABLE5: table5,
    TableName.APPENDIXB: appendix_b,
}


def reproduce(name: TableName | str) -> TableArtifact:
    return BUILDERS[TableName(name)]()
