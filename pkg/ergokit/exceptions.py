def _rebuild(cls, args, state):
    obj = Exception.__new__(cls)
    Exception.__init__(obj, *args)
    obj.__dict__.update(state)
    return obj


class ErgokitError(Exception):
    exit_code = 3

    # subclasses format their message in __init__, so
    # unpickling can't go back through their signatures
    def __reduce__(self):
        return _rebuild, (self.__class__, self.args, self.__dict__)


class ValidationError(ErgokitError, ValueError):
    """Inputs that violate a documented domain"""

    exit_code = 2


class NumericalError(ErgokitError, ArithmeticError):
    """A numerical procedure could not reach its tolerance"""

    exit_code = 3


class NonHermitianInput(ValidationError):
    def __init__(self, deviation: float):
        self.deviation = deviation
        super().__init__(
            "Operator is not Hermitian, max |A - A^H| = {:.3e}".format(
                deviation
            )
        )


class DimensionMismatch(ValidationError):
    def __init__(self, expected, got):
        super().__init__(
            f"Expected dimension {expected}, got dimension {got}"
        )


class DomainError(ValidationError):
    def __init__(self, name: str, value, domain: str):
        self.name = name
        self.value = value
        super().__init__(f"Parameter {name}={value} outside of {domain}")


class OutOfFamilyRange(ValidationError):
    def __init__(self, name: str, value, low, high):
        super().__init__(
            "Parameter {}={} not in isoergotropic range [{}, {}]".format(
                name, value, low, high
            )
        )


class SingularReference(ValidationError):
    def __init__(self, p_bar: float):
        super().__init__(
            "Reference state with p_bar={} has no inverse square "
            "root".format(p_bar)
        )


class UnphysicalState(ValidationError):
    def __init__(self, reason: str):
        super().__init__(f"Not a valid density operator: {reason}")


class UnphysicalCovariance(ValidationError):
    def __init__(self, det: float):
        self.det = det
        super().__init__(
            "Covariance matrix with det={:.6e} violates the "
            "uncertainty bound det >= 1/4".format(det)
        )


class ConfigError(ValidationError):
    pass


class TruncationTooSmall(NumericalError):
    def __init__(self, truncation: int, deficit: float):
        self.truncation = truncation
        self.deficit = deficit
        super().__init__(
            "Fock truncation {} leaves trace deficit {:.3e}".format(
                truncation, deficit
            )
        )


class NoBracket(NumericalError):
    def __init__(self, t_max: float):
        self.t_max = t_max
        super().__init__(
            f"Ergotropy never fell below half its initial value by t={t_max}"
        )


class SelftestFailure(NumericalError):
    def __init__(self, name: str, deviation: float, tolerance: float):
        self.name = name
        self.deviation = deviation
        self.tolerance = tolerance
        super().__init__(
            "Self test '{}' failed: deviation {:.3e} "
            "> tolerance {:.1e}".format(
                name, deviation, tolerance
            )
        )
