from __future__ import annotations


class RookstatError(Exception):
    pass


class CapExceededError(RookstatError, ValueError):
    def __init__(self, what: str, size: int, cap: int) -> None:
        super().__init__(f"{what} of size {size} exceeds the configured cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class AttackViolationError(RookstatError, ValueError):
    pass


class AttemptCapError(RookstatError, RuntimeError):
    pass


class DomainError(RookstatError, ValueError):
    pass


class ConfigError(RookstatError, ValueError):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"--{field.replace('_', '-')}: {message}")
        self.field = field
