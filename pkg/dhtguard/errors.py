from typing import Optional


class DhtError(Exception):
    pass


class RangeError(DhtError, ValueError):
    pass


class InputValidationError(DhtError, ValueError):
    pass


class ShapeError(DhtError, ValueError):
    pass


class UsageError(DhtError):
    pass


class DegenerateBaselineError(DhtError):
    """The zero-guard reconstruction is exact, so error ratios are undefined.

    Carries whatever absolute errors were computed before the ratio failed.
    """

    def __init__(self, rms_abs: Optional[float] = None):
        super().__init__("Reconstruction error without guard band is zero; ratio is undefined")
        self.rms_abs = rms_abs


class SweepNotFoundError(DhtError, LookupError):
    pass
