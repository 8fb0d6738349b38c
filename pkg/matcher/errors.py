class ResourceLimitError(RuntimeError):
    """Raised when an exact routine is asked for more than its configured limit.

    Never a wrong answer: callers either raise the limit or shrink the instance.
    """

    def __init__(self, what: str, limit: int, actual: int):
        self.what = what
        self.limit = limit
        self.actual = actual
        super().__init__(f"{what}: {actual} exceeds the configured limit of {limit}")


class InternalConsistencyError(RuntimeError):
    """A guaranteed post-condition did not hold (e.g. an exchange loop ran past its budget)."""
