"""Exception types raised across the package."""


class CCRError(ValueError):
    """Base class for all domain errors."""


class DimensionError(CCRError):
    pass


class DependentGeneratorsError(CCRError):
    pass


class NotInLatticeError(CCRError):
    def __init__(self, vector, msg=None):
        self.vector = vector
        super().__init__(msg or f"not in lattice: {vector}")


class RelationError(CCRError):
    """A resolvent relation was requested with invalid parameters."""

    def __init__(self, relation, msg):
        self.relation = relation
        super().__init__(f"[{relation}] {msg}")


class SampleError(CCRError):
    pass


class ParseError(CCRError):
    def __init__(self, msg, pos=None, src=None):
        self.pos = pos
        self.src = src
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{msg}{where}")
