"""Exception hierarchy shared by every flatlab module.

Each error knows which module raised it and carries a ``context`` dict so the
CLI can emit it as a machine-readable JSON record on stderr.
"""

from __future__ import annotations

from typing import Any


class FlatlabError(Exception):
    module = "flatlab"

    def __init__(self, message: str = "", **context: Any) -> None:
        super().__init__(message)
        self.message = message
        self.context = context

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict[str, Any]:
        return {
            "code": self.code,
            "module": self.module,
            "message": self.message,
            "context": {k: _jsonable(v) for k, v in self.context.items()},
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    to_json = getattr(value, "to_json", None)
    if callable(to_json):
        return to_json()
    return str(value)


# exactfield
class FieldError(FlatlabError):
    module = "exactfield"


class MixedField(FieldError):
    pass


class DivisionByZero(FieldError, ZeroDivisionError):
    pass


# surface kernel
class SurfaceError(FlatlabError):
    module = "surface"


class UnclosedPolygon(SurfaceError):
    pass


class EdgeMismatch(SurfaceError):
    pass


class NonSimplePolygon(SurfaceError):
    pass


class BadMatching(SurfaceError):
    pass


class NotUnimodular(SurfaceError):
    pass


class WrongStratum(SurfaceError):
    pass


class CollisionBeyondBoundary(SurfaceError):
    pass


class NonTerminatingFlips(SurfaceError):
    pass


class InexactSurface(SurfaceError):
    pass


# constructions
class InvalidParams(FlatlabError):
    module = "constructions"


# cylinders
class CylinderError(FlatlabError):
    module = "cylinders"


class TraceBudgetExceeded(CylinderError):
    pass


class WrongCylinderCount(CylinderError):
    pass


class NoSumRelation(CylinderError):
    pass


# saddles
class SaddleError(FlatlabError):
    module = "saddles"


class BoundTooLarge(SaddleError):
    pass


class NotOnBoundary(SaddleError):
    pass


# divergence lab
class DivergenceError(FlatlabError):
    module = "divergence"


class PoleAtT(DivergenceError):
    pass


class BothZero(DivergenceError):
    pass


class CaseUndetermined(DivergenceError):
    pass


# ergodic lab
class ErgodicError(FlatlabError):
    module = "ergodic"


class RelDegeneration(ErgodicError):
    pass


# cli
class CliError(FlatlabError):
    module = "cli"


class HashMismatch(CliError):
    pass


class OutputDrift(CliError):
    pass
