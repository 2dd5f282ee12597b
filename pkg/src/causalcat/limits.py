"""Size guards for the exponential parts of the engine.

All enumeration in this package is exhaustive, so every constructor and
search consults the active :class:`Limits`. Override them for a block of
code with :func:`limits`::

    with limits(max_morphisms=200):
        cat = free_category(big_quiver)
"""
from __future__ import annotations

import contextvars
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator


class SizeGuardError(ValueError):
    """Raised when a computation would exceed a configured size guard."""

    def __init__(self, guard: str, limit: int, actual: int | float, what: str = ""):
        self.guard = guard
        self.limit = limit
        self.actual = actual
        detail = f" ({what})" if what else ""
        super().__init__(f"size guard {guard}={limit} exceeded: {actual}{detail}")


@dataclass(frozen=True)
class Limits:
    max_objects: int = 12
    max_morphisms: int = 64
    max_set: int = 8
    max_assignments: int = 100_000
    # product of component function-space sizes searched by nat enumeration
    max_function_space: int = 10**12
    max_solutions: int = 1_000_000


_current: contextvars.ContextVar[Limits] = contextvars.ContextVar(
    "causalcat_limits", default=Limits()
)


def current_limits() -> Limits:
    return _current.get()


@contextmanager
def limits(**overrides: int) -> Iterator[Limits]:
    token = _current.set(replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)


def check(guard: str, actual: int | float, what: str = "") -> None:
    limit = getattr(current_limits(), guard)
    if actual > limit:
        raise SizeGuardError(guard, limit, actual, what)
