"""Exception types raised by the toolkit."""


class LoopError(Exception):
    """Base class for every error raised by moufang."""


class NotLatinSquare(LoopError):
    def __init__(self, axis: str, index: int):
        self.axis = axis
        self.index = index
        super().__init__(f"{axis} {index} is not a permutation of the element set")


class NoIdentity(LoopError):
    pass


class NotNormal(LoopError):
    def __init__(self, message: str = "subloop is not normal", witness=None):
        self.witness = witness
        super().__init__(message)


class UnknownName(LoopError):
    pass


class CapExceeded(LoopError):
    def __init__(self, cap: int, partial: int):
        self.cap = cap
        self.partial = partial
        super().__init__(f"cap {cap} exceeded (reached {partial})")


class NotDescending(LoopError):
    def __init__(self, position: int):
        self.position = position
        super().__init__(f"chain is not descending at position {position}")


class SeriesStalled(LoopError):
    pass


class DecompositionFailure(LoopError):
    def __init__(self, message: str, witness=None):
        self.witness = witness
        super().__init__(message)


class NotMaterialized(LoopError):
    pass


class NotCentralFactor(LoopError):
    pass


class NoComplementFound(LoopError):
    pass


class PreconditionViolated(LoopError):
    pass
