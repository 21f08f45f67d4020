"""Exceptions raised when loading data files."""

from __future__ import annotations


class DataError(Exception):
    """Base class for malformed catalog, matrix, signature or dump files."""


class SchemaError(DataError):
    def __init__(self, message: str, location: str | int | None = None) -> None:
        self.location = location
        where = f" ({location})" if location is not None else ""
        super().__init__(f"{message}{where}")


class DuplicateAlias(DataError):
    def __init__(self, tag: str, first: str, second: str) -> None:
        self.tag, self.first, self.second = tag, first, second
        super().__init__(f"alias {tag!r} claimed by both {first!r} and {second!r}")


class MissingCategoryPair(DataError):
    def __init__(self, upstream: str, downstream: str) -> None:
        self.upstream, self.downstream = upstream, downstream
        super().__init__(f"category_defaults lacks ({upstream}, {downstream})")


class DuplicateSignatureId(DataError):
    def __init__(self, sig_id: str) -> None:
        self.sig_id = sig_id
        super().__init__(f"duplicate signature id {sig_id!r}")
