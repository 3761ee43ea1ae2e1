"""Exceptions raised by the planner stack."""


class AmapfError(Exception):
    """Base class for all planner errors."""


class SelfIntersectingInput(AmapfError, ValueError):
    pass


class TerminalInsideObstacle(AmapfError, ValueError):
    def __init__(self, index, point):
        super().__init__(f"terminal {index} at {tuple(point)} lies inside an inflated region")
        self.index = index
        self.point = tuple(point)


class InfeasibleAssignment(AmapfError):
    pass


class StandaloneNotFound(AmapfError):
    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces or []


class RerouteCrossesObstacle(AmapfError):
    pass


class SeparationViolation(AmapfError, ValueError):
    def __init__(self, report):
        super().__init__(f"instance violates separation constraints: {report.summary()}")
        self.report = report


class ClassicAssumptionViolated(AmapfError):
    pass


class GenerationExhausted(AmapfError):
    pass


class ParseError(AmapfError, ValueError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        prefix = f"[{', '.join(where)}] " if where else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class PlannerFailure(AmapfError):
    """Wraps a planning error together with the traces collected so far."""

    def __init__(self, cause, traces):
        super().__init__(f"{type(cause).__name__}: {cause}")
        self.cause = cause
        self.traces = traces
