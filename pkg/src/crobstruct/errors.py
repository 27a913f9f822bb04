"""Exception hierarchy shared by all modules."""


class CRObstructError(Exception):
    """Base class for all library errors."""


class PreconditionError(CRObstructError):
    """An operation was called on data violating its documented precondition.

    The CLI maps every subclass to exit code 3.
    """


class DivisionByZero(PreconditionError, ZeroDivisionError):
    pass


class BlockMismatch(PreconditionError):
    pass


class OrderExhausted(PreconditionError):
    pass


class NonNilpotentSubstitution(PreconditionError):
    pass


class BadLinearPart(PreconditionError):
    pass


class SingularJacobian(PreconditionError):
    pass


class DimMismatch(PreconditionError):
    pass


class TooManyMaps(PreconditionError):
    pass


class NonUnitRhoW(PreconditionError):
    pass


class NonUnitDetRhoW(NonUnitRhoW):
    pass


class SingularRhoW(PreconditionError):
    pass


class RealityViolation(PreconditionError):
    def __init__(self, comp, alpha, mu, s):
        self.comp, self.alpha, self.mu, self.s = comp, alpha, mu, s
        super().__init__(
            f"reality condition fails for component {comp}: "
            f"coefficient of z^{list(alpha)} zb^{list(mu)} u^{list(s)} is not the "
            f"conjugate of the coefficient of z^{list(mu)} zb^{list(alpha)} u^{list(s)}"
        )


class ConstantOrLinearTerm(PreconditionError):
    pass


class DegenerateBlock(PreconditionError):
    pass


class OrderMismatch(PreconditionError):
    pass


class EmptyTargets(PreconditionError):
    pass


class FamilyMismatch(PreconditionError):
    pass


class SupportViolation(PreconditionError):
    pass


class SupportOverlap(PreconditionError):
    pass


class FormMismatch(PreconditionError):
    pass


class EmptyInput(PreconditionError):
    pass


class SurfaceSyntaxError(CRObstructError):
    """Malformed surface file; carries the 1-based line number."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MissingHeader(SurfaceSyntaxError):
    pass
