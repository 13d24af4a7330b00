"""Exhaustive enumeration of unlabeled posets with caching and work sharding.

Generation is orderly (canonical extension): every member of the (n-1)
universe is extended by one new point over all valid down/up-set pairs, and
an extension is kept exactly when the certificate of the parent is the
lexicographically least certificate among the extension's own cards.  Each
isomorphism class is therefore produced exactly once, from exactly one
parent class.

Cache files are plain text with a trailing sha256 checksum line; a checksum
or header mismatch raises CacheCorruptError.
"""

from __future__ import annotations

import hashlib
import os
from multiprocessing import Pool
from pathlib import Path

from .canonical import Cert, canonical_cert, cert_to_poset
from .core import Poset
from .deck import one_point_extensions
from .errors import CacheCorruptError, CapExceededError

CACHE_ENV = "ORDRECON_CACHE"
CACHE_FORMAT_VERSION = 1
DEFAULT_CAP = 9
FILTERS = ("all", "connected", "connected-coconnected")


def resolve_cache_dir(explicit=None):
    if explicit:
        return Path(explicit)
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else None


def _passes(p: Poset, filt: str) -> bool:
    if filt == "all":
        return True
    if filt == "connected":
        return p.is_connected()
    if filt == "connected-coconnected":
        return p.is_connected() and p.is_coconnected()
    raise ValueError(f"unknown filter {filt!r}")


def _accepted_children(parent_text: str) -> list[str]:
    """Orderly extensions of one parent, as sorted cert texts."""
    parent_cert = Cert.from_text(parent_text)
    parent = cert_to_poset(parent_cert)
    out = []
    for q, cert in one_point_extensions(parent):
        least = min(canonical_cert(q.delete(x)) for x in range(q.n))
        if least == parent_cert:
            out.append(cert.text())
    out.sort()
    return out


def enumerate_universe(n: int, filt: str = "all", jobs: int = 1,
                       cache_dir=None, cap: int = DEFAULT_CAP) -> list[Cert]:
    """Sorted certs of all posets on n elements matching the filter."""
    if n < 1 or n > cap:
        raise CapExceededError(f"n={n} outside 1..{cap}")
    if filt not in FILTERS:
        raise ValueError(f"unknown filter {filt!r}")
    cache = resolve_cache_dir(cache_dir)
    cached = _load_universe_cache(cache, n, filt)
    if cached is not None:
        return cached
    if filt != "all":
        certs = [c for c in enumerate_universe(n, "all", jobs, cache_dir, cap)
                 if _passes(cert_to_poset(c), filt)]
    elif n == 1:
        certs = [canonical_cert(Poset(1, [0]))]
    else:
        parents = enumerate_universe(n - 1, "all", jobs, cache_dir, cap)
        parent_texts = [c.text() for c in parents]
        if jobs > 1 and len(parent_texts) > 64:
            chunk = max(1, len(parent_texts) // (jobs * 8))
            with Pool(jobs) as pool:
                batches = pool.map(_accepted_children, parent_texts, chunksize=chunk)
        else:
            batches = [_accepted_children(t) for t in parent_texts]
        certs = sorted(Cert.from_text(t) for batch in batches for t in batch)
    _save_universe_cache(cache, n, filt, certs)
    return certs


def enumerate_by_global_dedup(n: int, jobs: int = 1, cap: int = DEFAULT_CAP) -> list[Cert]:
    """Independent extension strategy: extend everything, deduplicate globally.

    Used to cross-check the orderly counts; never cached.
    """
    if n < 1 or n > cap:
        raise CapExceededError(f"n={n} outside 1..{cap}")
    if n == 1:
        return [canonical_cert(Poset(1, [0]))]
    parents = enumerate_by_global_dedup(n - 1, jobs, cap)
    parent_texts = [c.text() for c in parents]
    if jobs > 1 and len(parent_texts) > 64:
        chunk = max(1, len(parent_texts) // (jobs * 8))
        with Pool(jobs) as pool:
            batches = pool.map(_all_children, parent_texts, chunksize=chunk)
    else:
        batches = [_all_children(t) for t in parent_texts]
    return sorted({Cert.from_text(t) for batch in batches for t in batch})


def _all_children(parent_text: str) -> list[str]:
    parent = cert_to_poset(Cert.from_text(parent_text))
    return sorted(cert.text() for _, cert in one_point_extensions(parent))


# -- checksummed text cache files -----------------------------------------------

def _write_checksummed(path: Path, header: str, lines: list[str]) -> None:
    body = header + "\n" + "".join(line + "\n" for line in lines)
    digest = hashlib.sha256(body.encode()).hexdigest()
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(body + f"sha256={digest}\n")
    tmp.replace(path)


def _read_checksummed(path: Path, expect_header: str) -> list[str]:
    text = path.read_text()
    lines = text.splitlines()
    if len(lines) < 2 or not lines[-1].startswith("sha256="):
        raise CacheCorruptError(f"{path}: missing checksum")
    body = "\n".join(lines[:-1]) + "\n"
    if hashlib.sha256(body.encode()).hexdigest() != lines[-1][len("sha256="):]:
        raise CacheCorruptError(f"{path}: checksum mismatch")
    if lines[0] != expect_header:
        raise CacheCorruptError(f"{path}: unexpected header {lines[0]!r}")
    return lines[1:-1]


def _universe_header(n: int, filt: str) -> str:
    return f"ordrecon-universe v{CACHE_FORMAT_VERSION} n={n} filter={filt}"


def _universe_path(cache: Path, n: int, filt: str) -> Path:
    return cache / f"universe_v{CACHE_FORMAT_VERSION}_n{n}_{filt}.txt"


def _load_universe_cache(cache, n: int, filt: str):
    if cache is None:
        return None
    path = _universe_path(cache, n, filt)
    if not path.exists():
        return None
    lines = _read_checksummed(path, _universe_header(n, filt))
    return [Cert.from_text(t) for t in lines]


def _save_universe_cache(cache, n: int, filt: str, certs) -> None:
    if cache is None:
        return
    _write_checksummed(_universe_path(cache, n, filt),
                       _universe_header(n, filt),
                       [c.text() for c in certs])


def save_deck_group_index(cache: Path, n: int, groups) -> None:
    header = f"ordrecon-deckgroups v{CACHE_FORMAT_VERSION} n={n}"
    lines = [" ".join(c.text() for c in group) for group in groups]
    _write_checksummed(cache / f"deckgroups_v{CACHE_FORMAT_VERSION}_n{n}.txt", header, lines)


def load_deck_group_index(cache: Path, n: int):
    path = cache / f"deckgroups_v{CACHE_FORMAT_VERSION}_n{n}.txt"
    if not path.exists():
        return None
    header = f"ordrecon-deckgroups v{CACHE_FORMAT_VERSION} n={n}"
    lines = _read_checksummed(path, header)
    return [[Cert.from_text(t) for t in line.split()] for line in lines]
