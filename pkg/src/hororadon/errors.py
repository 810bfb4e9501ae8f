class HoroRadonError(Exception):
    """base of all errors raised by hororadon"""


class AccuracyError(HoroRadonError, ArithmeticError):
    """an integral did not reach the requested tolerance

    the best available estimate travels with the exception.
    """
    def __init__(self, message: str, estimate: complex, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DomainError(HoroRadonError, ValueError):
    """input outside the domain of an operation (NaN samples, bad parameters)"""


class DegenerateDecomposition(HoroRadonError, ArithmeticError):
    """decomposition parameters are not unique at this element"""


class BoundaryOrbit(DegenerateDecomposition):
    """element lies on the lower dimensional H-orbits between the open ones"""


class InternalConsistencyError(HoroRadonError, RuntimeError):
    """a computed object violates a property it has by construction"""


class UnsupportedFamily(HoroRadonError, TypeError):
    """function family lacks a capability (e.g. a holomorphic extension)"""
