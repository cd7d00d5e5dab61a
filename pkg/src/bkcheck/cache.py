"""On-disk cache of expensive tables (Weyl groups, Schubert polynomials).

Each entry is one JSON file holding a format version, the artifact kind, the
key, a sha256 of the canonical payload and the payload itself.  Entries with
another version or a bad checksum are ignored and rebuilt.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Callable

FORMAT_VERSION = 1
ENV_VAR = "BKCHECK_CACHE_DIR"

log = logging.getLogger(__name__)


def resolve_cache_dir(flag: str | os.PathLike | None = None) -> Path:
    """Flag wins over the environment, which wins over the user cache directory."""
    if flag:
        return Path(flag)
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "bkcheck"


def _digest(payload: Any) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class Cache:
    def __init__(self, directory: str | os.PathLike | None = None, version: int = FORMAT_VERSION):
        self.directory = resolve_cache_dir(directory)
        self.version = version

    def path(self, kind: str, key: str) -> Path:
        return self.directory / f"{kind}-{key}.json"

    def get(self, kind: str, key: str) -> Any | None:
        p = self.path(kind, key)
        if not p.exists():
            return None
        try:
            doc = json.loads(p.read_text())
        except (OSError, ValueError) as exc:
            log.warning("cache entry %s unreadable (%s); rebuilding", p, exc)
            return None
        if doc.get("format_version") != self.version or doc.get("kind") != kind:
            log.warning("cache entry %s has an old format; rebuilding", p)
            return None
        if doc.get("sha256") != _digest(doc.get("payload")):
            log.warning("cache entry %s failed its checksum; rebuilding", p)
            return None
        return doc["payload"]

    def put(self, kind: str, key: str, payload: Any) -> Path:
        p = self.path(kind, key)
        doc = {"format_version": self.version, "kind": kind, "key": key,
               "sha256": _digest(payload), "payload": payload}
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
            os.replace(tmp, p)
        except OSError as exc:
            raise OSError(f"cannot write cache entry {p}: {exc}") from exc
        return p

    def get_or_build(self, kind: str, key: str, build: Callable[[], Any]) -> Any:
        hit = self.get(kind, key)
        if hit is not None:
            return hit
        payload = build()
        self.put(kind, key, payload)
        return payload


def cached_group(label: str, cache: Cache | None):
    """Weyl group of ``label`` through the cache (memoized in-process as well)."""
    from . import weyl

    if cache is None:
        return weyl.enumerate_group(label)
    R = weyl.build_root_system(label)
    if R.label in weyl._GROUPS:
        G = weyl._GROUPS[R.label]
        if not cache.path("weyl", R.label).exists():
            cache.put("weyl", R.label, G.to_json())
        return G
    doc = cache.get("weyl", R.label)
    if doc is not None:
        try:
            G = weyl.WeylGroup.from_json(doc)
        except (ValueError, KeyError) as exc:
            log.warning("cached group %s rejected (%s); rebuilding", R.label, exc)
            G = None
        if G is not None:
            weyl._GROUPS[R.label] = G
            return G
    G = weyl.enumerate_group(R)
    cache.put("weyl", R.label, G.to_json())
    return G


def cached_calculus(G, cache: Cache | None):
    """Schubert calculus for ``G`` with its polynomial table loaded from the cache."""
    from .schubert import SchubertCalculus, calculus

    calc = calculus(G)
    if cache is None:
        return calc
    if calc._table is not None:
        if not cache.path("schubert", G.R.label).exists():
            cache.put("schubert", G.R.label, calc.table_json())
        return calc
    doc = cache.get("schubert", G.R.label)
    if doc is not None:
        calc.load_table(SchubertCalculus.table_from_json(doc))
        return calc
    cache.put("schubert", G.R.label, calc.table_json())
    return calc
