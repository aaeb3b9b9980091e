"""Exception types shared by all selectors and the simulator."""


class CoinSelError(Exception):
    """Base class for all coinsel errors."""


class InsufficientFunds(CoinSelError):
    """The pool cannot cover the requested target."""


class Infeasible(CoinSelError):
    """No assignment satisfies the optimization constraints."""


class CapExceeded(CoinSelError):
    """Instance is larger than the exact-search size cap."""


class MaxInputsExceeded(CoinSelError):
    """A mandatory selection phase alone needs more inputs than allowed."""


class AmountError(CoinSelError):
    """An amount is negative or exceeds the 64-bit range."""
