class SemiclassicalError(Exception):
    exit_code = 1

    def __init__(self, message, operation=None):
        super().__init__(message)
        self.operation = operation

    def describe(self):
        if self.operation is None:
            return str(self)
        return f"error in {self.operation}: {self}"


class ConfigError(SemiclassicalError):
    exit_code = 2


class NumericalError(SemiclassicalError):
    exit_code = 3


class NoBoundOrbit(NumericalError):
    pass


class DegenerateTurningPoint(NumericalError):
    pass


class QuadratureFailure(NumericalError):
    pass


class PoleAtResonance(NumericalError):
    pass


class SpectrumOverflow(NumericalError):
    pass


class NonIntegerParticleNumber(NumericalError):
    pass


class ComplexResidual(NumericalError):
    pass


class GridTooSmall(NumericalError):
    pass


class ContinuumReached(NumericalError):
    pass
