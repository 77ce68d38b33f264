class ConstructionError(RuntimeError):
    """The staircase rules produced data violating a construction invariant."""


class ResourceLimitError(RuntimeError):
    """A descent exceeded its configured level cutoff."""
