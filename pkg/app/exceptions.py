from typing import Any

from app.schemas.errors import ErrorResponseSchema


class WeightingError(Exception):
    """Base error of the project, convertible to an error response."""

    stage: str | None = None

    def __init__(self,
                 detail: str,
                 stage: str | None = None,
                 context: dict[str, Any] | None = None) -> None:
        super().__init__(detail)
        self.detail = detail
        if stage is not None:
            self.stage = stage
        self.context = context or {}

    def to_schema(self) -> ErrorResponseSchema:
        return ErrorResponseSchema(error=type(self).__name__,
                                   detail=self.detail,
                                   stage=self.stage,
                                   context=self.context)


class EdgeListParseError(WeightingError):
    stage = 'input'

    def __init__(self, line_no: int, line: str) -> None:
        super().__init__(f'line {line_no}: cannot parse {line!r}',
                         context={'line': line_no})
        self.line_no = line_no


class SelfLoopError(EdgeListParseError):

    def __init__(self, line_no: int, line: str) -> None:
        WeightingError.__init__(self, f'line {line_no}: self-loop {line!r}',
                                context={'line': line_no})
        self.line_no = line_no


class RetryExhausted(WeightingError):

    def __init__(self, stage: str, violators: list[int],
                 attempts: int) -> None:
        super().__init__(
            f'{stage}: budget of {attempts} exhausted, '
            f'{len(violators)} persistent violators',
            stage=stage,
            context={'violators': violators[:20], 'attempts': attempts}
        )
        self.violators = violators


class InfeasibleProfile(WeightingError):
    stage = 'precheck'


class UnsupportedGraph(WeightingError):
    stage = 'precheck'


class AnalyticDomainError(WeightingError, ValueError):
    stage = 'analytic'

    def __init__(self, name: str, x: float, lo: float, hi: float) -> None:
        super().__init__(f'{name} defined on [{lo}, {hi}], got {x}',
                         context={'x': x})


class InconsistentSums(WeightingError):
    stage = 'w-stage'


class DegenerateLength(WeightingError):
    stage = 'w-stage'

    def __init__(self, vertex: int, scaled_degree: float) -> None:
        super().__init__(
            f'vertex {vertex}: eps_len * d_W = {scaled_degree:.3f} < 1',
            context={'vertex': vertex})
        self.vertex = vertex


class NoValidAddition(WeightingError):
    stage = 'w-stage'

    def __init__(self, vertex: int, context: dict[str, Any]) -> None:
        super().__init__(f'no admissible sum addition for vertex {vertex}',
                         context={'vertex': vertex, **context})
        self.vertex = vertex


class InsufficientFW(WeightingError):
    stage = 'w-stage'

    def __init__(self, vertex: int, needed: int, available: int) -> None:
        super().__init__(
            f'vertex {vertex} needs {needed} raised F_W edges, '
            f'has {available}',
            context={'vertex': vertex, 'needed': needed,
                     'available': available})
        self.vertex = vertex


class NoValidPair(WeightingError):
    stage = 'u-stage'

    def __init__(self, vertex: int, context: dict[str, Any]) -> None:
        super().__init__(f'no admissible sum pair for vertex {vertex}',
                         context={'vertex': vertex, **context})
        self.vertex = vertex


class VerificationFailure(WeightingError):
    stage = 'verify'
