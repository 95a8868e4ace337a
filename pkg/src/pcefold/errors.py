"""Exception types shared across the package."""


class PcefoldError(Exception):
    """Base class for all package errors."""


class EmptyInput(PcefoldError, ValueError):
    pass


class IllegalCharacter(PcefoldError, ValueError):
    def __init__(self, position: int, char: str):
        self.position = position
        self.char = char
        super().__init__(f"illegal character {char!r} at position {position}")


class MissingEnergyEntry(PcefoldError, KeyError):
    def __init__(self, pair_type: str):
        self.pair_type = pair_type
        super().__init__(f"no stacking energy for pair type {pair_type!r}")


class NonPositivePenalty(PcefoldError, ValueError):
    pass


class LengthMismatch(PcefoldError, ValueError):
    pass


class InfeasibleInput(PcefoldError, ValueError):
    pass


class NonPositiveM(PcefoldError, ValueError):
    pass


class CapacityExceeded(PcefoldError, ValueError):
    pass


class EncodingMismatch(PcefoldError, ValueError):
    pass


class SubsetNotInDevice(PcefoldError, ValueError):
    pass


class InvalidPair(PcefoldError, ValueError):
    pass


class ParamLengthMismatch(PcefoldError, ValueError):
    pass


class RegisterTooLarge(PcefoldError, ValueError):
    pass


class QubitMismatch(PcefoldError, ValueError):
    pass


class ZeroShots(PcefoldError, ValueError):
    pass


class ZeroOptimum(PcefoldError, ValueError):
    pass


class BelowOptimum(PcefoldError, ValueError):
    pass


class InvalidCounts(PcefoldError, ValueError):
    pass
