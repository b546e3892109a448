"""Exception hierarchy shared by every module."""


class SelfPairError(Exception):
    """Base class for all errors raised by selfpair."""


class DimensionMismatch(SelfPairError, ValueError):
    pass


class EmptyImage(SelfPairError, ValueError):
    pass


class InfeasibleCrop(SelfPairError):
    """No two disjoint square crops of the requested size fit in the source."""


class NoInstances(SelfPairError):
    pass


class InpaintError(SelfPairError):
    """The hole leaves no known pixel to propagate from."""


class PlanOutOfBounds(SelfPairError, ValueError):
    pass


class SourceUnusable(SelfPairError):
    """Every enabled strategy failed for a source."""

    def __init__(self, source_id, failures):
        self.source_id = source_id
        self.failures = dict(failures)
        detail = "; ".join(f"{k}: {v}" for k, v in self.failures.items())
        super().__init__(f"source {source_id!r} unusable ({detail})")

    def __reduce__(self):
        return type(self), (self.source_id, self.failures)


class SelfCheckError(SelfPairError, AssertionError):
    """A synthesized change label disagrees with its recorded pre/post labels."""


class MissingMask(SelfPairError):
    def __init__(self, stem):
        self.stem = stem
        super().__init__(f"no mask found for image {stem!r}")

    def __reduce__(self):
        return type(self), (self.stem,)


class UndecodableFile(SelfPairError):
    def __init__(self, stem, path, reason=""):
        self.stem = stem
        self.path = path
        self.reason = reason
        super().__init__(f"cannot decode {path} (stem {stem!r}) {reason}".rstrip())

    def __reduce__(self):
        return type(self), (self.stem, self.path, self.reason)


class IoFailure(SelfPairError, OSError):
    pass
