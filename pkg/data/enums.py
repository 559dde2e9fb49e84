from enum import Enum, IntEnum, auto


class DiscClass(Enum):
    """Square class of a unit in the residue field"""
    SQUARE = "square"
    NONSQUARE = "nonsquare"

    @classmethod
    def from_legendre(cls, symbol: int) -> "DiscClass":
        return cls.SQUARE if symbol == 1 else cls.NONSQUARE

    @property
    def legendre(self) -> int:
        return 1 if self is DiscClass.SQUARE else -1


class WitnessKind(Enum):
    """Outcome of checking a candidate congruence witness"""
    INTEGRAL = "IntegralWitness"
    RATIONAL_ONLY = "RationalOnlyWitness"
    NOT_WITNESS = "NotWitness"


class ResidueInvolution(Enum):
    # [[a,pb],[c,d]] -> [[a,pc],[b,d]]
    TRANSPOSE_TWIST = "first"
    # [[a,pb],[c,d]] -> [[d,pb],[c,a]]
    DIAGONAL_SWAP = "second"


class ExitCode(IntEnum):
    SUCCESS = 0
    PROPERTY_VIOLATION = 1
    INPUT_ERROR = 2


class FindingStatus(Enum):
    PASSED = auto()
    FAILED = auto()
    SKIPPED = auto()
