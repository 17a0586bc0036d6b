"""Shared fixtures.

``tables8`` is cheap (about a second) and backs most unit tests.
``tables12`` performs the full desk-scale solve once per session, recording
per-weight wall time; the acceptance tests consume both the tables and the
timings.
"""

from __future__ import annotations

import time

import pytest

from zetaforge.solver import RunConfig, solve_in_memory, solve_weight


@pytest.fixture(scope="session")
def tables8():
    return solve_in_memory(8, RunConfig(jobs=1))


@pytest.fixture(scope="session")
def tables12():
    """Solved weights 2..12 plus per-weight wall-clock seconds (4 workers)."""
    config = RunConfig(jobs=4)
    tables: dict = {}
    seconds: dict[int, float] = {}
    for w in range(2, 13):
        t0 = time.monotonic()
        tables[w] = solve_weight(w, tables, config)
        seconds[w] = time.monotonic() - t0
    return tables, seconds
