"""Toolkit exception hierarchy.

Validation-type errors map to CLI exit code 1, provider errors to exit
code 2 (see cli.main).
"""

from __future__ import annotations


class SapphireError(Exception):
    """Base class for all toolkit errors."""


class ParseError(SapphireError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        loc = f"{path or '<input>'}:{line}" if line is not None else (path or "<input>")
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line


class CorpusValidationError(SapphireError):
    """Record-level contract violation (duplicate ids, bad fields, ...)."""


class CapacityError(SapphireError):
    """Not enough examples of a size to satisfy a split spec."""

    def __init__(self, size: int, requested: int, available: int):
        super().__init__(
            f"split needs {requested} examples of concept-set size {size}, "
            f"only {available} available (deficit {requested - available})"
        )
        self.size = size
        self.requested = requested
        self.available = available


class MissingIdError(SapphireError):
    """An id referenced by one artifact is absent from another."""

    def __init__(self, example_id: str):
        super().__init__(f"no entry for example id {example_id!r}")
        self.example_id = example_id


class ProviderError(SapphireError):
    """A model provider failed; carries the example id when known."""

    def __init__(self, message: str, example_id: str | None = None):
        if example_id is not None:
            message = f"example {example_id!r}: {message}"
        super().__init__(message)
        self.example_id = example_id


class RegistryError(SapphireError):
    """Unknown provider kind."""

    def __init__(self, kind: str, known: list[str]):
        super().__init__(f"unknown provider kind {kind!r}; known kinds: {', '.join(sorted(known))}")
        self.kind = kind
