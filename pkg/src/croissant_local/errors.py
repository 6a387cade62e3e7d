"""Exception hierarchy. CLI exit codes hang off these classes."""

from __future__ import annotations


class CroissantError(Exception):
    exit_code = 2


class UsageError(CroissantError):
    """Bad or missing user input (flags, paths, semantic metadata)."""

    exit_code = 2


class ConfigurationError(CroissantError):
    """Registry misconfiguration, e.g. two handlers with the same name."""

    exit_code = 2


class InvariantError(CroissantError):
    """An internal invariant was broken; indicates a bug, not bad input."""

    exit_code = 2


class NoSupportedFilesError(CroissantError):
    exit_code = 3

    def __init__(self, message: str = "no supported files found") -> None:
        super().__init__(message)


class DocumentValidationError(CroissantError):
    exit_code = 1

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "\n".join(str(v) for v in self.violations)
        super().__init__(f"document failed validation:\n{lines}")
