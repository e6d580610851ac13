"""Hamming-range matching over stored encodings.

`scan_match` is the definitional oracle; `MatchIndex` is the production
structure.  The index partitions the n coordinate positions into tau+1
contiguous blocks: two vectors within distance tau must agree exactly on
at least one block (pigeonhole), so candidate retrieval by block key
followed by full verification returns exactly the oracle's result set.
"""

from __future__ import annotations

import threading
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence


@dataclass(frozen=True)
class DatabaseEntry:
    user_id: str
    encoding: tuple[int, ...]
    tag: str = "uninfected"
    received_at: float = 0.0


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of coordinate positions where a and b differ."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(x != y for x, y in zip(a, b))


def scan_match(
    entries: Iterable[DatabaseEntry], e: Sequence[int], tau: int
) -> list[DatabaseEntry]:
    """Exhaustive O(D) filter: every entry within Hamming distance tau of e."""
    return [entry for entry in entries if hamming(entry.encoding, e) <= tau]


def _partition(n: int, pieces: int) -> list[tuple[int, int]]:
    """Split positions 0..n-1 into `pieces` contiguous blocks, sizes off by <= 1."""
    base, rem = divmod(n, pieces)
    blocks = []
    start = 0
    for i in range(pieces):
        size = base + (1 if i < rem else 0)
        blocks.append((start, start + size))
        start += size
    return blocks


class MatchIndex:
    """Static Hamming-range index with exact (oracle-equal) query results.

    Storage is (tau+1) block keys per entry.  Mutations are serialized by
    a lock; queries read a consistent snapshot (entries are append-only).
    """

    def __init__(self, n: int, tau: int):
        if tau < 0 or n < 1:
            raise ValueError("need n >= 1 and tau >= 0")
        self.n = n
        self.tau = tau
        self.blocks = _partition(n, tau + 1)
        self._tables: list[dict[tuple[int, ...], list[int]]] = [
            {} for _ in self.blocks
        ]
        self._entries: list[DatabaseEntry] = []
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> list[DatabaseEntry]:
        return list(self._entries)

    def add(self, entry: DatabaseEntry) -> None:
        if len(entry.encoding) != self.n:
            raise ValueError(
                f"encoding length {len(entry.encoding)} != index length {self.n}"
            )
        with self._lock:
            eid = len(self._entries)
            self._entries.append(entry)
            for table, (lo, hi) in zip(self._tables, self.blocks):
                table.setdefault(entry.encoding[lo:hi], []).append(eid)

    def key_count(self) -> int:
        """Total stored block keys; always (tau+1) * D."""
        return sum(len(ids) for table in self._tables for ids in table.values())

    def query(self, e: Sequence[int], tau: int | None = None) -> list[DatabaseEntry]:
        """All entries within distance tau of e; identical to scan_match."""
        if tau is None:
            tau = self.tau
        if tau > self.tau:
            raise ValueError(f"query tau={tau} exceeds build-time tau={self.tau}")
        if len(e) != self.n:
            raise ValueError(f"query length {len(e)} != index length {self.n}")
        e = tuple(e)
        candidates: set[int] = set()
        for table, (lo, hi) in zip(self._tables, self.blocks):
            candidates.update(table.get(e[lo:hi], ()))
        return [
            self._entries[i]
            for i in sorted(candidates)
            if hamming(self._entries[i].encoding, e) <= tau
        ]


def build_index(
    entries: Iterable[DatabaseEntry], n: int, tau: int
) -> MatchIndex:
    index = MatchIndex(n, tau)
    for entry in entries:
        index.add(entry)
    return index


def exact_lookup(
    table: Sequence[tuple[tuple[int, ...], DatabaseEntry]], e: Sequence[int]
) -> list[DatabaseEntry]:
    """Binary search in a lexicographically sorted (encoding, entry) table."""
    e = tuple(e)
    lo = bisect_left(table, e, key=lambda item: item[0])
    hi = bisect_right(table, e, key=lambda item: item[0])
    return [entry for _, entry in table[lo:hi]]


def build_exact_table(
    entries: Iterable[DatabaseEntry],
) -> list[tuple[tuple[int, ...], DatabaseEntry]]:
    return sorted(
        ((entry.encoding, entry) for entry in entries), key=lambda item: item[0]
    )


def save_entries(entries: Iterable[DatabaseEntry], path: str | Path) -> None:
    """Write entries as `user_id<TAB>tag<TAB>comma-separated-coords` lines."""
    with open(path, "w") as fh:
        for entry in entries:
            coords = ",".join(str(c) for c in entry.encoding)
            fh.write(f"{entry.user_id}\t{entry.tag}\t{coords}\n")


def load_entries(path: str | Path) -> list[DatabaseEntry]:
    entries = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
        user_id, tag, coords = parts
        entries.append(
            DatabaseEntry(
                user_id=user_id,
                tag=tag,
                encoding=tuple(int(tok) for tok in coords.split(",")),
            )
        )
    return entries
