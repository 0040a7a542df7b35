"""Refusal and inconclusive outcomes, kept distinct from ordinary errors."""


class AssouadError(Exception):
    reason = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details

    def to_json(self):
        return {"reason": self.reason, "message": str(self), "details": _jsonable(self.details)}


class RefusalError(AssouadError):
    """A precondition of a formula is not met, so no value is produced."""

    reason = "refusal"


class DoublingGuardError(RefusalError):
    reason = "doubling_guard"


class SeparationError(RefusalError):
    reason = "separation"


class InconclusiveError(AssouadError):
    """Enclosures too wide (or iteration budget spent) to decide."""

    reason = "inconclusive"


class ResolutionError(InconclusiveError):
    """A ball lower bound is 0 at the requested depth."""

    reason = "resolution_exhausted"


def _jsonable(v):
    from fractions import Fraction

    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return str(v)
    if isinstance(v, (int, float, str, bool)) or v is None:
        return v
    return str(v)
