"""Exception hierarchy shared by every wheelforge module."""


class WheelForgeError(Exception):
    """Base class for all wheelforge errors."""


class UsageError(WheelForgeError, ValueError):
    """An argument violates an operation's precondition."""


class ResourceCapError(WheelForgeError):
    """A level cap, memory budget or scan ceiling would be exceeded."""
