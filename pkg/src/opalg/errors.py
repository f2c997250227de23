"""Exception types shared by all modules.

Every error carries a ``payload`` dict so the CLI can serialize it.
``InputError`` subclasses mean the caller handed us malformed data;
``DomainError`` subclasses mean the data is well formed but the
mathematical precondition of the operation fails.
"""


class OpAlgError(Exception):
    def __init__(self, message="", **payload):
        super().__init__(message or self.__class__.__name__)
        self.payload = payload

    def to_dict(self):
        out = {"type": self.__class__.__name__, "message": str(self)}
        out.update(self.payload)
        return out


class InputError(OpAlgError):
    pass


class DomainError(OpAlgError):
    pass


# malformed input
class InvalidShape(InputError):
    pass


class InvalidInput(InputError):
    pass


class MalformedJson(InputError):
    pass


class UnknownCommand(InputError):
    pass


class AlgebraViolation(InputError):
    """Raised by ``build_algebra``; ``violations`` lists every failed check."""

    def __init__(self, message="", violations=(), **payload):
        super().__init__(message, violations=list(violations), **payload)
        self.violations = list(violations)


class AssociativityViolation(AlgebraViolation):
    pass


class InvolutionViolation(AlgebraViolation):
    pass


class NormViolation(AlgebraViolation):
    pass


# numerical / domain failures
class NoConvergence(DomainError):
    pass


class NotPositive(DomainError):
    pass


class NotHermitian(DomainError):
    pass


class NotNormal(DomainError):
    pass


class NotInvertible(DomainError):
    pass


class NotCommutative(DomainError):
    pass


class NotSemisimple(DomainError):
    pass


class NotCyclic(DomainError):
    pass


class NotAState(DomainError):
    pass


class PoleOnSpectrum(DomainError):
    pass


class SpectralRadiusTooLarge(DomainError):
    pass


class MuTooSmall(DomainError):
    pass


class TransformVanishes(DomainError):
    pass


class ZeroFunctional(DomainError):
    pass


class GammaTooSmall(DomainError):
    pass


class MissingPoint(DomainError):
    pass


class ZeroRepresentation(DomainError):
    pass


class ZeroVector(DomainError):
    pass


class SupportExceedsTruncation(DomainError):
    pass


class NoSeparatingVector(DomainError):
    pass
