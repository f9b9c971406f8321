"""Exception types shared across modules; the CLI maps them to exit codes."""


class ResourceError(RuntimeError):
    """Refusal raised before an allocation that would exceed the configured cap."""

    def __init__(self, what: str, required_bytes: int, limit_bytes: int):
        self.what = what
        self.required_bytes = int(required_bytes)
        self.limit_bytes = int(limit_bytes)
        super().__init__(
            f"{what} needs about {self.required_bytes / 2**20:.1f} MiB, "
            f"limit is {self.limit_bytes / 2**20:.1f} MiB"
        )

    def to_json(self) -> dict:
        return {
            "error": "resource",
            "what": self.what,
            "required_bytes": self.required_bytes,
            "limit_bytes": self.limit_bytes,
        }


class PreconditionError(ValueError):
    """An input violates a checked precondition; ``residual`` holds the measured gap."""

    def __init__(self, message: str, residual: float | None = None):
        self.residual = residual
        super().__init__(message if residual is None else f"{message} (residual {residual:.3e})")


DEFAULT_MAX_BYTES = 2 << 30
_limit = [DEFAULT_MAX_BYTES]


def set_max_bytes(limit: int | None):
    """Process-wide cap used when a call passes ``max_bytes=None``."""
    _limit[0] = DEFAULT_MAX_BYTES if limit is None else int(limit)


def get_max_bytes() -> int:
    return _limit[0]


def check_bytes(what: str, required: int, limit: int | None):
    limit = _limit[0] if limit is None else limit
    if required > limit:
        raise ResourceError(what, required, limit)
