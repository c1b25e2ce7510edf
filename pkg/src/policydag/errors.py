"""Exception types shared across the pipeline."""


class PolicydagError(Exception):
    """Base class for pipeline failures."""


class BackendError(PolicydagError):
    """The text-generation backend failed after exhausting retries."""


class MappingError(PolicydagError):
    """Every indicator query failed; the episode cannot be assessed."""


class IngestError(PolicydagError):
    """The input corpus file is unreadable or structurally invalid."""
