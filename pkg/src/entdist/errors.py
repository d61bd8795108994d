class EntDistError(ValueError):
    """Base class for contract violations raised by entdist."""


class DimensionError(EntDistError):
    pass


class NormalizationError(EntDistError):
    pass


class NotHermitianError(EntDistError):
    pass


class UnsupportedDimsError(EntDistError):
    """An operation defined only for qubits was given a d > 2 subsystem."""


class InvalidDensityMatrixError(EntDistError):
    pass
