"""Exception hierarchy shared by every stage of the pipeline.

Each family maps to one CLI exit code (see :data:`EXIT_CODES`).
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLoc:
    line: int
    col: int = 1

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class HdlSliceError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 5

    def __init__(self, message: str, loc: SourceLoc | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def format(self, filename: str = "<input>") -> str:
        """Render as ``file:line:col: error: message``."""
        if self.loc is None:
            return f"{filename}: error: {self.message}"
        return f"{filename}:{self.loc.line}:{self.loc.col}: error: {self.message}"


# -- parse stage (exit 2) ----------------------------------------------------


class ParseError(HdlSliceError):
    exit_code = 2


class HdlSyntaxError(ParseError):
    pass


class DuplicateName(ParseError):
    pass


class UnknownSignal(ParseError):
    pass


# -- elaboration stage (exit 3) ----------------------------------------------


class ElaborationError(HdlSliceError):
    exit_code = 3


class CombinationalLoop(ElaborationError):
    def __init__(self, cycle: list[str], loc: SourceLoc | None = None):
        self.cycle = cycle
        super().__init__("combinational loop: " + "->".join(cycle), loc)


class MultipleDrivers(ElaborationError):
    def __init__(self, signal: str, loc: SourceLoc | None = None):
        self.signal = signal
        super().__init__(f"signal '{signal}' has multiple drivers", loc)


class WidthMismatch(ElaborationError):
    pass


class IllegalAssignment(ElaborationError):
    pass


class UndrivenOutput(ElaborationError):
    pass


# -- configuration / user input (exit 4) --------------------------------------


class ConfigError(HdlSliceError):
    exit_code = 4


class UnknownObservationSignal(ConfigError):
    pass


class EmptyCriterion(ConfigError):
    pass


class NoMatchingTargets(ConfigError):
    pass


class StimulusError(ConfigError):
    pass


class EmptyStimulus(StimulusError):
    pass


# -- runtime (exit 5) ---------------------------------------------------------


class SimulationError(HdlSliceError):
    exit_code = 5


class MemoryIndexOutOfRange(SimulationError):
    def __init__(self, signal: str, index: int, cycle: int | None):
        self.signal = signal
        self.index = index
        self.cycle = cycle
        super().__init__(f"memory '{signal}' index {index} out of range at cycle {cycle}")


class FaultOutOfBounds(SimulationError):
    pass


class TraceMismatchHorizon(SimulationError):
    pass


class ModeRequiresDynamicSlice(HdlSliceError):
    pass


class ReportInvariantError(HdlSliceError):
    pass


EXIT_CODES = {
    ParseError: 2,
    ElaborationError: 3,
    ConfigError: 4,
    HdlSliceError: 5,
}
