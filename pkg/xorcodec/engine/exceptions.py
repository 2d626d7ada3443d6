"""
Exception hierarchy for the codec engine.

Every error carries a short machine-readable ``code`` and the process exit
status the management commands report for it.
"""

from typing import Any, Dict, Optional


class CodecError(Exception):
    """Base exception for codec errors."""

    code = "codec_error"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': 'error',
            'error': self.code,
            'message': self.message,
            'details': self.details,
        }


class MalformedInputError(CodecError):
    """Input data does not match its manifest or declared sizes."""

    code = "malformed_input"
    exit_code = 3


class InvalidParameterError(CodecError):
    """A parameter is outside its valid range."""

    code = "invalid_parameter"
    exit_code = 3


class UndefinedRatioError(InvalidParameterError):
    """A ratio over unpruned bits was requested with no unpruned bits."""

    code = "undefined_ratio"


class CorruptArtifactError(CodecError):
    """An encoded artifact failed structural or integrity checks."""

    code = "corrupt_artifact"
    exit_code = 3


class ResourceLimitError(CodecError):
    """The trellis context n_in*(n_s+1) exceeds the configured cap."""

    code = "resource_limit"
    exit_code = 4


class VerificationError(CodecError):
    """Decompressed output differs from the original on an unpruned bit."""

    code = "verification_failed"
    exit_code = 2
