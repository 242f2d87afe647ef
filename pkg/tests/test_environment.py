import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curiosityq.dirichlet_mdp import cumulative_gain, new_posterior_table
from curiosityq.environment import (
    CliqueCorridorLayout,
    EnvSpec,
    RngStream,
    is_irreducible,
    make_clique_corridor,
    make_random_mdp,
    step,
)
from curiosityq.errors import DomainError
from curiosityq.trajectory import TRAJECTORY_COLUMNS, simulate, spawn_streams


def reachable_bfs(adj, start):
    """Plain depth-first reachability, independent of the package."""
    seen, stack = {start}, [start]
    while stack:
        u = stack.pop()
        for v in range(len(adj)):
            if adj[u][v] and v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


class TestEnvSpec:
    def test_validation(self):
        with pytest.raises(DomainError):
            EnvSpec(np.ones((2, 1, 2)))
        with pytest.raises(DomainError):
            EnvSpec(np.full((2, 1, 3), 1 / 3))
        with pytest.raises(DomainError):
            EnvSpec(np.full((2, 1, 2), 0.5), initial_state=2)

    def test_text_round_trip(self, tmp_path):
        env = make_random_mdp(4, 3, seed=7)
        path = tmp_path / "env.txt"
        env.save(path)
        assert path.read_text().splitlines()[0] == "4 3 0"
        back = EnvSpec.load(path)
        np.testing.assert_array_equal(back.kernel, env.kernel)
        assert back.initial_state == env.initial_state

    def test_malformed_text(self):
        with pytest.raises(DomainError):
            EnvSpec.from_text("2 1 0\n1 0\n")


class TestStep:
    def test_deterministic_row(self):
        k = np.zeros((3, 1, 3))
        k[:, 0, 2] = 1.0
        env = EnvSpec(k)
        rng = RngStream(0)
        assert all(step(env, s, 0, rng) == 2 for s in range(3) for _ in range(20))

    def test_frequencies(self):
        env = EnvSpec(np.array([[[0.2, 0.5, 0.3]], [[1.0, 0.0, 0.0]], [[0.0, 0.0, 1.0]]]))
        rng = RngStream(1)
        draws = np.array([step(env, 0, 0, rng) for _ in range(40000)])
        freq = np.bincount(draws, minlength=3) / draws.size
        np.testing.assert_allclose(freq, [0.2, 0.5, 0.3], atol=0.01)

    def test_never_lands_on_zero_probability(self):
        env = EnvSpec(np.array([[[0.0, 1.0, 0.0]], [[0.5, 0.0, 0.5]], [[0.0, 0.0, 1.0]]]))
        rng = RngStream(2)
        assert {step(env, 1, 0, rng) for _ in range(2000)} == {0, 2}

    def test_same_seed_same_draws(self):
        env = make_random_mdp(5, 2, seed=3)
        a, b = RngStream(9), RngStream(9)
        assert [step(env, i % 5, i % 2, a) for i in range(100)] == [step(env, i % 5, i % 2, b) for i in range(100)]

    def test_index_error(self):
        env = make_random_mdp(2, 2, seed=0)
        with pytest.raises(IndexError):
            step(env, 2, 0, RngStream(0))


class TestIrreducible:
    def test_self_loops(self):
        k = np.zeros((2, 1, 2))
        k[0, 0, 0] = k[1, 0, 1] = 1.0
        assert not is_irreducible(EnvSpec(k))

    def test_cycle(self):
        S = 6
        k = np.zeros((S, 1, S))
        for s in range(S):
            k[s, 0, (s + 1) % S] = 1.0
        assert is_irreducible(EnvSpec(k))

    def test_one_way_chain(self):
        k = np.zeros((3, 1, 3))
        k[0, 0, 1] = k[1, 0, 2] = k[2, 0, 2] = 1.0
        assert not is_irreducible(EnvSpec(k))

    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_random_mdps(self, seed):
        env = make_random_mdp(4, 2, seed)
        adj = env.kernel.mean(axis=1) > 0
        assert all(len(reachable_bfs(adj, s)) == 4 for s in range(4))
        np.testing.assert_allclose(env.kernel.sum(axis=2), 1.0, atol=1e-12)


class TestCliqueCorridor:
    @pytest.fixture
    def env(self):
        return make_clique_corridor(5, 50, seed=4)

    def test_shape_and_rows(self, env):
        assert env.S == 60 and env.A == 2 and env.initial_state == 0
        assert np.max(np.abs(env.kernel.sum(axis=2) - 1.0)) <= 1e-12

    def test_corridor_rows_are_deterministic(self, env):
        lay = CliqueCorridorLayout(5, 50)
        for c in lay.corridor:
            for a in range(2):
                row = env.kernel[c, a]
                assert np.count_nonzero(row) == 1 and row.max() == 1.0
                assert np.argmax(row) == (c - 1 if a == 0 else c + 1)

    def test_boundary_wiring(self, env):
        assert env.kernel[4, 1, 5] == 1.0
        assert env.kernel[55, 0, 54] == 1.0
        support_a = set(np.flatnonzero(env.kernel[4, 0]))
        assert support_a <= set(range(6))
        assert set(np.flatnonzero(env.kernel[55, 1])) <= {54} | set(range(55, 60))
        for s in range(4):
            for a in range(2):
                assert set(np.flatnonzero(env.kernel[s, a])) <= set(range(5))

    def test_irreducible(self, env):
        adj = env.kernel.mean(axis=1) > 0
        assert len(reachable_bfs(adj, 0)) == 60
        assert len(reachable_bfs(adj.T, 0)) == 60
        assert is_irreducible(env)

    def test_deterministic_generation(self):
        a = make_clique_corridor(3, 4, seed=11)
        b = make_clique_corridor(3, 4, seed=11)
        c = make_clique_corridor(3, 4, seed=12)
        np.testing.assert_array_equal(a.kernel, b.kernel)
        assert not np.array_equal(a.kernel, c.kernel)

    def test_layout_regions(self):
        lay = CliqueCorridorLayout(5, 50)
        assert [lay.region(s) for s in (0, 4, 5, 54, 55, 59)] == ["A", "A", "corridor", "corridor", "B", "B"]

    def test_invalid(self):
        with pytest.raises(DomainError):
            make_clique_corridor(0, 3, 0)


class TestSimulate:
    class Fixed:
        def __init__(self, a):
            self.a = a
            self.seen = []

        def act(self, s, table):
            return self.a

        def learn(self, s, a, s2, reward, before, after):
            self.seen.append((s, a, s2, reward))

    def test_log_contents(self):
        env = make_random_mdp(3, 2, seed=5)
        table = new_posterior_table(3, 2, 0.5)
        env_rng, _ = spawn_streams(0)
        ex = self.Fixed(1)
        log = simulate(env, table, 50, ex, env_rng)
        assert list(log.t) == list(range(1, 51))
        assert np.all(log.a == 1)
        assert np.all(log.realized_gain >= 0)
        assert np.all(log.s[1:] == log.s2[:-1])
        assert log.final_table.counts.sum() == pytest.approx(table.counts.sum() + 50)
        assert log.cumulative_gain[-1] == pytest.approx(cumulative_gain(log.final_table, table), rel=1e-12)
        assert [r for *_, r in ex.seen] == list(log.realized_gain)

    def test_zero_steps(self):
        env = make_random_mdp(3, 2, seed=5)
        table = new_posterior_table(3, 2, 0.5)
        log = simulate(env, table, 0, self.Fixed(0), spawn_streams(0)[0])
        assert len(log) == 0 and log.final_table == table

    def test_csv_layout(self):
        env = make_random_mdp(3, 2, seed=5)
        log = simulate(env, new_posterior_table(3, 2, 0.5), 3, self.Fixed(0), spawn_streams(1)[0])
        lines = log.to_csv().splitlines()
        assert lines[0].startswith("# {")
        assert lines[1] == ",".join(TRAJECTORY_COLUMNS)
        assert len(lines) == 5

    def test_shape_mismatch(self):
        env = make_random_mdp(3, 2, seed=5)
        with pytest.raises(DomainError):
            simulate(env, new_posterior_table(2, 2, 1.0), 3, self.Fixed(0), spawn_streams(0)[0])
