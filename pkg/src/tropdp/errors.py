"""Exception types shared across the workbench.

Every error carries a short machine-readable ``code`` (``MISSING_VARIABLE``,
``SCALE_EXCEEDED`` ...) so the CLI can map failures to exit codes without
parsing messages.
"""

from __future__ import annotations


class WorkbenchError(Exception):
    """Base error; ``code`` names the failure condition."""

    code = "ERROR"

    def __init__(self, code: str | None = None, message: str = ""):
        if code is not None:
            self.code = code
        self.message = message or self.code
        super().__init__(f"{self.code}: {self.message}" if message else self.code)


class ScaleExceeded(WorkbenchError):
    """Raised when an instance is beyond the supported enumeration/extraction scale.

    Codes: SCALE_EXCEEDED, CAP_EXCEEDED, WIDTH_EXCEEDED.
    """

    code = "SCALE_EXCEEDED"


class VerificationFailure(WorkbenchError):
    """A checked property (bound, cover validity, thinness) does not hold."""

    code = "VERIFICATION_FAILED"
