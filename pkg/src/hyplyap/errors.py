"""Exception types shared across the package."""


class HyplyapError(Exception):
    """Base class for all errors raised by hyplyap."""


class InvalidParams(HyplyapError):
    """Parameter lists violate the basic requirements (ties, empty, ...)."""


class SingularSystem(HyplyapError):
    """The linear system defining the monodromy is numerically singular."""


class SingularMatrix(HyplyapError):
    """An explicitly given monodromy product is not invertible."""


class TableInconsistent(HyplyapError):
    """The coset step table failed its exact integer verification."""


class FrameOverflow(HyplyapError):
    """Cocycle frame entries exceeded the overflow guard before a QR step."""


class InsufficientData(HyplyapError):
    """Not enough accumulated data to form the requested error windows."""


class IntegerGamma(HyplyapError):
    """The eigenvalue-sum difference landed on an integer (chamber wall)."""


class ChamberWall(HyplyapError):
    """Requested parameters sit on a tie or integer wall between chambers."""


class NonUnimodular(HyplyapError):
    """An eigenvalue that should lie on the unit circle does not."""


class NoRealization(HyplyapError):
    """No real (C, d) pair realizes the requested rotation numbers."""
