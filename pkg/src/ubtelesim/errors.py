"""Exception types shared across the simulator."""


class UbteleError(Exception):
    """Base class for all package errors."""


class ConfigError(UbteleError):
    """Invalid configuration. ``errors`` lists one message per offending field."""

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SimulationFault(UbteleError):
    """Non-finite state or input detected; the trial must halt."""


class FrameError(UbteleError):
    """Base class for wire-frame decode failures."""


class BadMagic(FrameError):
    pass


class BadVersion(FrameError):
    pass


class BadLength(FrameError):
    pass


class BadChecksum(FrameError):
    pass


class EmptyTraceError(UbteleError):
    """A band summary was requested for a trace with no samples."""


class SchemaError(UbteleError):
    """Session log is malformed or has an unsupported schema version."""
