"""Shared fixtures: small named posets and a persistent cache directory."""

from __future__ import annotations

import os
from pathlib import Path

import pytest

from ordrecon.core import Poset


CACHE_DIR = Path(os.environ.get("ORDRECON_TEST_CACHE",
                                Path.home() / ".cache" / "ordrecon-test"))
CACHE_DIR.mkdir(parents=True, exist_ok=True)


@pytest.fixture(scope="session")
def cache_dir() -> str:
    return str(CACHE_DIR)


def chain(n: int) -> Poset:
    return Poset.from_cover_pairs(n, [(i, i + 1) for i in range(n - 1)])


def antichain(n: int) -> Poset:
    return Poset.from_cover_pairs(n, [])


def v_poset() -> Poset:
    return Poset.from_cover_pairs(3, [(0, 1), (0, 2)])


def lam_poset() -> Poset:
    return Poset.from_cover_pairs(3, [(1, 0), (2, 0)])


def n_poset() -> Poset:
    return Poset.from_cover_pairs(4, [(0, 2), (1, 2), (1, 3)])


def crown() -> Poset:
    return Poset.from_cover_pairs(4, [(0, 2), (0, 3), (1, 2), (1, 3)])


def star(leaves: int) -> Poset:
    return Poset.from_cover_pairs(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
