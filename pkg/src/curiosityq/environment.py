"""Ground-truth finite MDPs: container, sampler, generators and text format."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ResourceError

_ROW_TOL = 1e-12


class RngStream:
    """Seeded stream of uniform draws; equal seeds give equal sequences."""

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    @classmethod
    def from_generator(cls, gen: np.random.Generator) -> "RngStream":
        obj = cls.__new__(cls)
        obj.seed = None
        obj._gen = gen
        return obj

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def uniform(self) -> float:
        return float(self._gen.random())

    def integers(self, n: int) -> int:
        return int(self._gen.integers(n))


@dataclass(frozen=True)
class EnvSpec:
    kernel: np.ndarray
    initial_state: int = 0

    def __post_init__(self):
        k = np.array(self.kernel, dtype=float)
        if k.ndim != 3 or k.shape[0] != k.shape[2] or k.size == 0:
            raise DomainError("kernel must have shape (S, A, S)")
        if np.any(k < 0) or np.any(np.abs(k.sum(axis=2) - 1.0) > _ROW_TOL):
            raise DomainError("kernel rows must be probability vectors")
        if not 0 <= self.initial_state < k.shape[0]:
            raise DomainError("initial state out of range")
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)

    @property
    def S(self) -> int:
        return self.kernel.shape[0]

    @property
    def A(self) -> int:
        return self.kernel.shape[1]

    def to_text(self) -> str:
        """Header ``S A init`` then one line of S probabilities per (s, a), s-major."""
        lines = [f"{self.S} {self.A} {self.initial_state}"]
        for s in range(self.S):
            for a in range(self.A):
                lines.append(" ".join(repr(float(p)) for p in self.kernel[s, a]))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EnvSpec":
        lines = [ln for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
        try:
            S, A, init = (int(x) for x in lines[0].split())
            rows = [[float(x) for x in ln.split()] for ln in lines[1:]]
        except (ValueError, IndexError) as exc:
            raise DomainError(f"malformed environment file: {exc}") from exc
        if len(rows) != S * A or any(len(r) != S for r in rows):
            raise DomainError("environment body does not match its S A header")
        return cls(np.array(rows).reshape(S, A, S), init)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "EnvSpec":
        return cls.from_text(Path(path).read_text())


def step(env: EnvSpec, s: int, a: int, rng: RngStream) -> int:
    """Sample the successor of (s, a) by inverse CDF over the row in index order."""
    if not (0 <= s < env.S and 0 <= a < env.A):
        raise IndexError(f"(s, a) = {(s, a)} out of range")
    row = env.kernel[s, a]
    u = rng.uniform()
    cdf = np.cumsum(row)
    s2 = int(np.searchsorted(cdf, u, side="right"))
    if s2 >= env.S:
        # u fell in the rounding slack above cdf[-1]
        s2 = int(np.flatnonzero(row)[-1])
    return s2


def is_irreducible(env: EnvSpec) -> bool:
    """Strong connectivity of the chain driven by uniformly random actions."""
    adj = env.kernel.mean(axis=1) > 0

    def reaches_all(matrix: np.ndarray) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in np.flatnonzero(matrix[u]):
                if v not in seen:
                    seen.add(int(v))
                    queue.append(int(v))
        return len(seen) == env.S

    return reaches_all(adj) and reaches_all(adj.T)


def make_random_mdp(S: int, A: int, seed: int, max_attempts: int = 100) -> EnvSpec:
    """Rows from a flat Dirichlet, resampled until the chain is irreducible."""
    if S < 1 or A < 1:
        raise DomainError("S and A must be positive")
    gen = np.random.Generator(np.random.PCG64(seed))
    for _ in range(max_attempts):
        kernel = gen.dirichlet(np.ones(S), size=(S, A)) if S > 1 else np.ones((1, A, 1))
        kernel = kernel / kernel.sum(axis=2, keepdims=True)
        env = EnvSpec(kernel, 0)
        if is_irreducible(env):
            return env
    raise ResourceError(f"no irreducible MDP found in {max_attempts} attempts")


@dataclass(frozen=True)
class CliqueCorridorLayout:
    """0-based state layout: clique A, then the corridor, then clique B."""

    clique_size: int
    corridor_len: int

    @property
    def S(self) -> int:
        return 2 * self.clique_size + self.corridor_len

    @property
    def clique_a(self) -> range:
        return range(0, self.clique_size)

    @property
    def corridor(self) -> range:
        return range(self.clique_size, self.clique_size + self.corridor_len)

    @property
    def clique_b(self) -> range:
        return range(self.clique_size + self.corridor_len, self.S)

    def region(self, s: int) -> str:
        if s < self.clique_size:
            return "A"
        if s < self.clique_size + self.corridor_len:
            return "corridor"
        return "B"


def make_clique_corridor(clique_size: int, corridor_len: int, seed: int) -> EnvSpec:
    """Two random cliques joined by a deterministic corridor.

    Action 0 moves toward clique A (lower indices) and action 1 toward clique
    B. Inside the corridor both actions are deterministic. Each clique's
    boundary state leaves deterministically into the corridor with its outward
    action; its inward action is a random row over the clique plus the
    corridor entrance. All other clique rows are random over the clique.
    Random rows are flat-Dirichlet draws. The walk starts at state 0.
    """
    if clique_size < 1 or corridor_len < 1:
        raise DomainError("clique_size and corridor_len must be positive")
    lay = CliqueCorridorLayout(clique_size, corridor_len)
    S = lay.S
    gen = np.random.Generator(np.random.PCG64(seed))
    kernel = np.zeros((S, 2, S))

    def random_row(support: list[int]) -> np.ndarray:
        row = np.zeros(S)
        row[support] = gen.dirichlet(np.ones(len(support))) if len(support) > 1 else 1.0
        return row / row.sum()

    first, last = lay.corridor[0], lay.corridor[-1]
    bound_a, bound_b = lay.clique_a[-1], lay.clique_b[0]
    for clique, boundary, inward, outward, entrance in (
        (lay.clique_a, bound_a, 0, 1, first),
        (lay.clique_b, bound_b, 1, 0, last),
    ):
        members = list(clique)
        for s in members:
            for a in (0, 1):
                if s == boundary and a == outward:
                    kernel[s, a, entrance] = 1.0
                elif s == boundary and a == inward:
                    kernel[s, a] = random_row(members + [entrance])
                else:
                    kernel[s, a] = random_row(members)
    for c in lay.corridor:
        kernel[c, 0, bound_a if c == first else c - 1] = 1.0
        kernel[c, 1, bound_b if c == last else c + 1] = 1.0
    return EnvSpec(kernel, 0)
