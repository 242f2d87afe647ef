"""Dirichlet posteriors over the transitions of a finite MDP.

``PosteriorTable.counts[s, a]`` holds the Dirichlet pseudo-counts over the
next state after doing ``a`` in ``s``. Tables behave as values: ``observe``
returns a new table and never touches the original.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .info_geometry import expected_info_gain, kl_dirichlet


@dataclass(frozen=True)
class TableStats:
    c_alpha: float
    g_alpha: float


class PosteriorTable:
    __slots__ = ("_counts",)

    def __init__(self, counts):
        arr = np.array(counts, dtype=float)
        if arr.ndim != 3 or arr.shape[0] != arr.shape[2] or arr.size == 0:
            raise DomainError("counts must have shape (S, A, S)")
        if not (np.all(np.isfinite(arr)) and np.all(arr > 0)):
            raise DomainError("all pseudo-counts must be finite and positive")
        arr.setflags(write=False)
        self._counts = arr

    @property
    def counts(self) -> np.ndarray:
        return self._counts

    @property
    def S(self) -> int:
        return self._counts.shape[0]

    @property
    def A(self) -> int:
        return self._counts.shape[1]

    @property
    def shape(self) -> tuple[int, int, int]:
        return self._counts.shape

    def row(self, s: int, a: int) -> np.ndarray:
        self._check(s, a)
        return self._counts[s, a]

    def totals(self) -> np.ndarray:
        """alpha_{s,a}: pseudo-count total per (state, action)."""
        return self._counts.sum(axis=2)

    def stats(self) -> TableStats:
        gains = [pair_gain(self, s, a) for s in range(self.S) for a in range(self.A)]
        return TableStats(c_alpha=float(self.totals().min()), g_alpha=float(max(gains)))

    def scaled(self, factor: float) -> "PosteriorTable":
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        return PosteriorTable(self._counts * factor)

    def key(self) -> bytes:
        return self._counts.tobytes()

    def _check(self, s: int, a: int, s2: int = 0):
        if not (0 <= s < self.S and 0 <= a < self.A and 0 <= s2 < self.S):
            raise IndexError(f"index {(s, a, s2)} out of range for table {self.shape}")

    def __eq__(self, other):
        return isinstance(other, PosteriorTable) and np.array_equal(self._counts, other._counts)

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"PosteriorTable(S={self.S}, A={self.A}, total={self._counts.sum():g})"

    def to_text(self) -> str:
        """Header ``S A`` then one line of S counts per (s, a), s-major."""
        lines = [f"{self.S} {self.A}"]
        for s in range(self.S):
            for a in range(self.A):
                lines.append(" ".join(repr(float(x)) for x in self._counts[s, a]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PosteriorTable":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        try:
            S, A = (int(x) for x in lines[0].split())
            rows = [[float(x) for x in ln.split()] for ln in lines[1:]]
        except (ValueError, IndexError) as exc:
            raise DomainError(f"malformed posterior table: {exc}") from exc
        if len(rows) != S * A or any(len(r) != S for r in rows):
            raise DomainError("posterior table body does not match its S A header")
        return cls(np.array(rows).reshape(S, A, S))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "PosteriorTable":
        return cls.from_text(Path(path).read_text())


def new_posterior_table(S: int, A: int, prior_count: float) -> PosteriorTable:
    if S < 1 or A < 1:
        raise DomainError("S and A must be positive")
    if not prior_count > 0:
        raise DomainError("prior_count must be positive")
    return PosteriorTable(np.full((S, A, S), float(prior_count)))


def observe(table: PosteriorTable, s: int, a: int, s2: int) -> PosteriorTable:
    """Table with one more observed transition s -a-> s2."""
    table._check(s, a, s2)
    counts = table.counts.copy()
    counts[s, a, s2] += 1.0
    return PosteriorTable(counts)


def predictive(table: PosteriorTable, s: int, a: int) -> np.ndarray:
    row = table.row(s, a)
    return row / row.sum()


def pair_gain(table: PosteriorTable, s: int, a: int) -> float:
    return expected_info_gain(table.row(s, a))


def realized_gain(table: PosteriorTable, s: int, a: int, s2: int) -> float:
    """KL gain of actually observing s -a-> s2 relative to ``table``."""
    table._check(s, a, s2)
    row = table.counts[s, a]
    bumped = row.copy()
    bumped[s2] += 1.0
    return kl_dirichlet(bumped, row)


def cumulative_gain(table: PosteriorTable, prior: PosteriorTable) -> float:
    """KL of the joint posterior from the joint prior (sum over independent rows)."""
    if table.shape != prior.shape:
        raise DomainError(f"shape mismatch {table.shape} vs {prior.shape}")
    total = 0.0
    for s in range(table.S):
        for a in range(table.A):
            post_row = table.counts[s, a]
            prior_row = prior.counts[s, a]
            if not np.array_equal(post_row, prior_row):
                total += kl_dirichlet(post_row, prior_row)
    return total
