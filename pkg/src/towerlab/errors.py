"""Exception hierarchy shared by every towerlab module."""


class TowerlabError(Exception):
    """Base class for all library errors."""


class SpecMismatch(TowerlabError):
    """Operands live in different function fields."""


class NotAPower(TowerlabError):
    """Raised by pth_root when the element is not a p^m-th power in K."""


class BudgetExceeded(TowerlabError):
    """A computation would need a monomial dimension above the configured cap."""

    def __init__(self, dimension, cap):
        super().__init__(f"monomial dimension {dimension} exceeds budget cap {cap}")
        self.dimension = dimension
        self.cap = cap


class NotAPowerTower(TowerlabError):
    """Composite law W_j = W_i * K^{p^j} failed for the pair (i, j)."""

    def __init__(self, i, j):
        super().__init__(f"not a power tower: W_{j} != W_{i} * K^(p^{j})")
        self.i = i
        self.j = j


class NotInSubfield(TowerlabError):
    """An element expected to lie in a subfield does not."""


class PoolInsufficient(TowerlabError):
    """Greedy p-basis selection found fewer than N independent elements."""


class NotExponentOne(TowerlabError):
    pass


class DimensionLawViolation(TowerlabError):
    """[W : Ann(F)] != p^rank(F); the input was not a p-Lie algebra."""


class MismatchAtLevel(TowerlabError):
    def __init__(self, level, detail=""):
        super().__init__(f"unpacked algebra differs from tangent space at level {level} {detail}".rstrip())
        self.level = level


class SearchExhausted(TowerlabError):
    pass


class PreconditionError(TowerlabError):
    pass
