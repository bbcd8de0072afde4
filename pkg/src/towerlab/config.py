"""Process-wide budget cap on the monomial dimension p^(hN)."""

from __future__ import annotations

import contextlib
import os

from .errors import BudgetExceeded

DEFAULT_BUDGET = 1024
_budget = None


def get_budget() -> int:
    if _budget is not None:
        return _budget
    env = os.environ.get("TOWERLAB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_BUDGET


def set_budget(cap: int | None) -> None:
    global _budget
    _budget = cap


@contextlib.contextmanager
def budget(cap: int):
    global _budget
    old = _budget
    _budget = cap
    try:
        yield
    finally:
        _budget = old


def check_budget(dimension: int) -> None:
    cap = get_budget()
    if dimension > cap:
        raise BudgetExceeded(dimension, cap)
