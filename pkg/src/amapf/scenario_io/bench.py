"""Classic (separation 4) versus modified (separation 2 sqrt 3) comparison table."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

from ..planner import SQRT3x2, Instance, PlannerConfig, plan, validate_separation
from ..validation import check_solution
from .generator import min_pairwise_separation

COLUMNS = (
    "instance_id",
    "m",
    "min_separation",
    "classic_outcome",
    "modified_outcome",
    "initial_assignment_cost",
    "classic_cost",
    "modified_cost",
    "n_direct",
    "n_6a",
    "n_6b",
    "min_prefix_6b",
    "error",
)


@dataclass
class BenchRow:
    instance_id: str
    m: int
    min_separation: float
    classic_outcome: str  # rejected | solved | failed
    modified_outcome: str
    initial_assignment_cost: float | None = None
    classic_cost: float | None = None
    modified_cost: float | None = None
    n_direct: int = 0
    n_6a: int = 0
    n_6b: int = 0
    min_prefix_6b: float | None = None
    error: str = ""


def _run_mode(instance: Instance, mode: str, threshold: float):
    if not validate_separation(instance, threshold).passed:
        return "rejected", None, None
    try:
        res = plan(instance, PlannerConfig(mode=mode))
    except Exception as exc:  # a row records the failure; the bench goes on
        return "failed", None, f"{mode}: {type(exc).__name__}: {exc}"
    rep = check_solution(instance, res)
    if not rep.passed:
        return "failed", res, f"{mode}: check failed ({len(rep.violations)} violations)"
    return "solved", res, None


def bench_instance(instance_id: str, instance: Instance) -> BenchRow:
    row = BenchRow(instance_id, instance.m, min_pairwise_separation(instance), "", "")
    errors = []
    row.classic_outcome, classic, err = _run_mode(instance, "classic", 4.0)
    if err:
        errors.append(err)
    row.modified_outcome, modified, err = _run_mode(instance, "modified", SQRT3x2)
    if err:
        errors.append(err)
    if classic is not None and row.classic_outcome == "solved":
        row.classic_cost = classic.sum_of_costs
    if modified is not None and row.modified_outcome == "solved":
        row.modified_cost = modified.sum_of_costs
        row.initial_assignment_cost = modified.initial_assignment_cost
        counts = modified.branch_counts
        row.n_direct, row.n_6a, row.n_6b = counts["direct"], counts["6a"], counts["6b"]
        prefixes = [t.prefix_length for t in modified.traces if t.branch == "6b"]
        row.min_prefix_6b = min(prefixes) if prefixes else None
    row.error = "; ".join(errors)
    return row


def _bench_job(args):
    return bench_instance(*args)


def run_bench(items: list[tuple[str, Instance]], workers: int = 1) -> list[BenchRow]:
    """One row per instance, in input order regardless of completion order."""
    if workers <= 1:
        return [bench_instance(i, inst) for i, inst in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_bench_job, items))


def summarize(rows: list[BenchRow]) -> dict:
    n = len(rows)

    def rate(mode, outcome):
        return sum(getattr(r, f"{mode}_outcome") == outcome for r in rows) / n if n else math.nan

    both = [r for r in rows if r.classic_cost is not None and r.modified_cost is not None]
    iters = sum(r.n_direct + r.n_6a + r.n_6b for r in rows)
    accepted_mod = [r for r in rows if r.modified_outcome != "rejected"]
    return {
        "instances": n,
        "classic_acceptance_rate": 1.0 - rate("classic", "rejected") if n else math.nan,
        "modified_acceptance_rate": 1.0 - rate("modified", "rejected") if n else math.nan,
        "classic_solved_rate": rate("classic", "solved"),
        "modified_solved_rate_on_accepted": (
            sum(r.modified_outcome == "solved" for r in accepted_mod) / len(accepted_mod) if accepted_mod else math.nan
        ),
        "modified_failures": [r.instance_id for r in rows if r.modified_outcome == "failed"],
        "mean_cost_gap": (sum(r.modified_cost - r.classic_cost for r in both) / len(both)) if both else math.nan,
        "branch_6b_frequency": (sum(r.n_6b for r in rows) / iters) if iters else math.nan,
        "instances_with_6b": sum(r.n_6b > 0 for r in rows),
    }


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([_cell(d[c]) for c in COLUMNS])
    return buf.getvalue()


def bench_directory(in_dir: Path, out_csv: Path, workers: int = 1) -> tuple[list[BenchRow], dict]:
    """Bench every ``*.json`` instance in ``in_dir``; unreadable files become failed rows."""
    from ..errors import ParseError
    from .formats import parse_instance

    items, bad = [], []
    for path in sorted(Path(in_dir).glob("*.json")):
        try:
            items.append((path.stem, parse_instance(path.read_bytes())))
        except (ParseError, OSError) as exc:
            bad.append(BenchRow(path.stem, 0, math.nan, "failed", "failed", error=f"parse: {exc}"))
    rows = run_bench(items, workers) + bad
    rows.sort(key=lambda r: r.instance_id)
    Path(out_csv).write_text(rows_to_csv(rows))
    return rows, summarize(rows)
