"""Versioned JSON files for instances and solutions.

Both formats are plain JSON laid out one item per line so fixtures stay
hand-editable and diffs stay small. Floats are written with ``repr``
precision, so parsing and re-serializing reproduces the same bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields

from ..errors import ParseError, SelfIntersectingInput
from ..geometry import PolyPath, as_polygon
from ..planner import Instance, IterationTrace, Move, PlannerConfig, PlanResult

INSTANCE_FORMAT = "amapf-instance"
SOLUTION_FORMAT = "amapf-solution"
VERSION = 1


# writing


def _compact(obj) -> str:
    return json.dumps(obj, separators=(", ", ": "), sort_keys=True, allow_nan=False)


def _block(key: str, items: list, last: bool = False) -> list[str]:
    if not items:
        return [f'  "{key}": []' + ("" if last else ",")]
    out = [f'  "{key}": [']
    out += [f"    {_compact(x)}" + ("," if k < len(items) - 1 else "") for k, x in enumerate(items)]
    out.append("  ]" + ("" if last else ","))
    return out


def _document(head: list[tuple[str, object]], blocks: list[tuple[str, list]]) -> bytes:
    lines = ["{"]
    lines += [f'  "{k}": {_compact(v)},' for k, v in head]
    for n, (k, items) in enumerate(blocks):
        lines += _block(k, items, last=n == len(blocks) - 1)
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_instance(instance: Instance) -> bytes:
    head = [
        ("format", INSTANCE_FORMAT),
        ("version", VERSION),
        ("bounds", list(instance.bounds) if instance.bounds is not None else None),
        ("generator", instance.metadata),
    ]
    blocks = [
        ("obstacles", [[list(v) for v in ring] for ring in instance.obstacles]),
        ("starts", [list(p) for p in instance.starts]),
        ("goals", [list(p) for p in instance.goals]),
    ]
    return _document(head, blocks)


def instance_digest(instance: Instance) -> str:
    return hashlib.sha256(serialize_instance(instance)).hexdigest()


# reading


def _line_of(text: str, key: str) -> int | None:
    idx = text.find(f'"{key}"')
    return None if idx < 0 else text.count("\n", 0, idx) + 1


def _load(data: bytes | str, expected: str) -> tuple[dict, str]:
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", line=1)
    if doc.get("format") != expected:
        raise ParseError(f"expected format {expected!r}", line=_line_of(text, "format"), field="format")
    if doc.get("version") != VERSION:
        raise ParseError(f"unsupported version {doc.get('version')!r}", line=_line_of(text, "version"), field="version")
    return doc, text


class _Reader:
    def __init__(self, doc: dict, text: str):
        self.doc = doc
        self.text = text

    def fail(self, msg: str, field: str):
        raise ParseError(msg, line=_line_of(self.text, field.split("[")[0].split(".")[0]), field=field)

    def get(self, key: str, required: bool = True):
        if key not in self.doc:
            if required:
                self.fail("missing field", key)
            return None
        return self.doc[key]

    def number(self, x, field: str) -> float:
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            self.fail("expected a number", field)
        x = float(x)
        if not math.isfinite(x):
            self.fail("number must be finite", field)
        return x

    def point(self, p, field: str) -> tuple[float, float]:
        if not isinstance(p, list) or len(p) != 2:
            self.fail("expected a point [x, y]", field)
        return (self.number(p[0], field), self.number(p[1], field))

    def points(self, key: str) -> list[tuple[float, float]]:
        raw = self.get(key)
        if not isinstance(raw, list):
            self.fail("expected a list of points", key)
        return [self.point(p, f"{key}[{k}]") for k, p in enumerate(raw)]


def parse_instance(data: bytes | str) -> Instance:
    """Instance from file contents. Raises ParseError naming the line and field at fault."""
    doc, text = _load(data, INSTANCE_FORMAT)
    rd = _Reader(doc, text)
    rings = rd.get("obstacles")
    if not isinstance(rings, list):
        rd.fail("expected a list of vertex rings", "obstacles")
    obstacles = []
    for k, ring in enumerate(rings):
        f = f"obstacles[{k}]"
        if not isinstance(ring, list) or len(ring) < 3:
            rd.fail("a ring needs at least 3 vertices", f)
        pts = [rd.point(v, f"{f}[{q}]") for q, v in enumerate(ring)]
        try:
            as_polygon(pts)
        except SelfIntersectingInput as exc:
            rd.fail(str(exc), f)
        obstacles.append(pts)
    starts = rd.points("starts")
    goals = rd.points("goals")
    if not starts:
        rd.fail("need at least one agent", "starts")
    if len(starts) != len(goals):
        rd.fail(f"{len(starts)} starts but {len(goals)} goals", "goals")
    bounds = rd.get("bounds", required=False)
    if bounds is not None:
        if not isinstance(bounds, list) or len(bounds) != 4:
            rd.fail("expected [x0, y0, x1, y1]", "bounds")
        bounds = [rd.number(b, "bounds") for b in bounds]
        if bounds[2] <= bounds[0] or bounds[3] <= bounds[1]:
            rd.fail("empty bounds", "bounds")
    meta = rd.get("generator", required=False)
    if meta is not None and not isinstance(meta, dict):
        rd.fail("expected an object", "generator")
    return Instance(obstacles=obstacles, starts=starts, goals=goals, bounds=bounds, metadata=meta)


# solutions

_TRACE_FIELDS = [f.name for f in fields(IterationTrace)]


@dataclass(frozen=True, eq=False)
class SolutionFile:
    instance_digest: str
    plan: PlanResult
    seed: int | None = None
    report: dict | None = None

    @classmethod
    def from_plan(cls, instance: Instance, plan: PlanResult, report=None) -> "SolutionFile":
        seed = (instance.metadata or {}).get("seed")
        rep = report.to_dict() if hasattr(report, "to_dict") else report
        return cls(instance_digest(instance), plan, seed, rep)

    def matches(self, instance: Instance) -> bool:
        return self.instance_digest == instance_digest(instance)


def serialize_solution(sol: SolutionFile) -> bytes:
    plan = sol.plan
    cfg = plan.config
    config = {
        "mode": cfg.mode,
        "separation_threshold": cfg.separation_threshold,
        "arc_segments": cfg.arc_segments,
        "refine_retries": cfg.refine_retries,
        "eps": cfg.eps,
        "seed": sol.seed,
    }
    head = [
        ("format", SOLUTION_FORMAT),
        ("version", VERSION),
        ("instance_digest", sol.instance_digest),
        ("config", config),
        ("sum_of_costs", plan.sum_of_costs),
        ("initial_assignment_cost", plan.initial_assignment_cost),
        ("report", sol.report),
    ]
    moves = [
        {"agent": mv.agent, "length": mv.path.length, "waypoints": mv.path.waypoints.tolist()} for mv in plan.moves
    ]
    return _document(head, [("moves", moves), ("traces", [asdict(tr) for tr in plan.traces])])


def parse_solution(data: bytes | str) -> SolutionFile:
    doc, text = _load(data, SOLUTION_FORMAT)
    rd = _Reader(doc, text)
    digest = rd.get("instance_digest")
    if not isinstance(digest, str):
        rd.fail("expected a hex digest", "instance_digest")
    cfg = rd.get("config")
    if not isinstance(cfg, dict):
        rd.fail("expected an object", "config")
    try:
        config = PlannerConfig(
            mode=cfg["mode"],
            separation_threshold=float(cfg["separation_threshold"]),
            arc_segments=int(cfg["arc_segments"]),
            refine_retries=int(cfg["refine_retries"]),
            eps=float(cfg["eps"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        rd.fail(f"bad planner configuration: {exc}", "config")
    moves = []
    raw_moves = rd.get("moves")
    if not isinstance(raw_moves, list):
        rd.fail("expected a list", "moves")
    for k, mv in enumerate(raw_moves):
        f = f"moves[{k}]"
        if not isinstance(mv, dict) or not isinstance(mv.get("agent"), int) or not isinstance(mv.get("waypoints"), list):
            rd.fail("expected {agent, length, waypoints}", f)
        W = [rd.point(p, f"{f}.waypoints") for p in mv["waypoints"]]
        if not W:
            rd.fail("empty waypoint list", f)
        path = PolyPath(W)
        if "length" in mv and abs(rd.number(mv["length"], f"{f}.length") - path.length) > 1e-9 * max(1.0, path.length):
            rd.fail("stated length disagrees with the waypoints", f"{f}.length")
        moves.append(Move(mv["agent"], path))
    traces = []
    raw_traces = rd.get("traces")
    if not isinstance(raw_traces, list):
        rd.fail("expected a list", "traces")
    for k, tr in enumerate(raw_traces):
        if not isinstance(tr, dict) or set(tr) != set(_TRACE_FIELDS):
            rd.fail("trace fields do not match", f"traces[{k}]")
        traces.append(IterationTrace(**tr))
    plan = PlanResult(
        moves=tuple(moves),
        sum_of_costs=rd.number(rd.get("sum_of_costs"), "sum_of_costs"),
        initial_assignment_cost=rd.number(rd.get("initial_assignment_cost"), "initial_assignment_cost"),
        traces=tuple(traces),
        config=config,
    )
    seed = cfg.get("seed")
    report = rd.get("report", required=False)
    return SolutionFile(digest, plan, seed, report)
