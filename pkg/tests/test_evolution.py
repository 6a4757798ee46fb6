import math

import numpy as np
import pytest

from numeralgame import DMPair, NeedDistribution, avg_ms_complexity_dm, covers
from numeralgame.agents import AgentConfig
from numeralgame.evolution import (ALTERNATIVE, CURRENT, TRAJECTORY_FIELDS, BanditState, BernoulliGame,
                                   EvolutionConfig, communication_phase, q_update, run_evolution,
                                   select_grammar, trajectory_to_csv)
from numeralgame.reference import starting_pair

SUPPORT = NeedDistribution(99)


def test_select_rule():
    s = BanditState(q_values=[0.2, 0.7], pull_counts=[10, 3])
    assert select_grammar(s, n=0.9) == ALTERNATIVE  # greedy
    assert select_grammar(s, n=0.5) == ALTERNATIVE  # least explored
    s.q_values = [0.9, 0.1]
    assert select_grammar(s, n=0.9) == CURRENT
    assert select_grammar(s, n=0.5) == ALTERNATIVE
    s.pull_counts = [3, 3]
    assert select_grammar(s, n=0.5) == CURRENT
    s.epsilon = 1.0
    assert all(select_grammar(s, n=n) == CURRENT for n in np.linspace(0, 0.999, 50))


def test_conventional_rule_flag():
    s = BanditState(q_values=[0.9, 0.1], pull_counts=[10, 3], greedy_on_high=False)
    assert select_grammar(s, n=0.5) == CURRENT
    assert select_grammar(s, n=0.9) == ALTERNATIVE


def test_tie_keeps_current():
    s = BanditState(q_values=[0.5, 0.5])
    assert s.best_arm() == CURRENT


def test_q_update():
    s = BanditState()
    q_update(s, CURRENT, 1.0)
    assert s.q_values[CURRENT] == pytest.approx(0.1)
    assert s.pull_counts == [1, 0]
    s.q_values[ALTERNATIVE] = 0.4
    q_update(s, ALTERNATIVE, 0.4)
    assert s.q_values[ALTERNATIVE] == 0.4


def test_q_geometric_convergence():
    s = BanditState(alpha=0.1)
    prev = 0.0
    for k in range(1, 60):
        q_update(s, CURRENT, 1.0)
        q = s.q_values[CURRENT]
        assert q > prev
        assert q == pytest.approx(1.0 - 0.9 ** k, abs=1e-12)
        prev = q


def test_phase_resets_state():
    s = BanditState(q_values=[0.3, 0.3], pull_counts=[5, 5])
    game = BernoulliGame(lambda dm: 0.0)
    dm = DMPair((1, 2), (3,), 10)
    communication_phase(game, (dm, dm), 0, np.random.default_rng(0), s)
    assert s.q_values == [0.0, 0.0] and s.pull_counts == [0, 0]


def test_better_arm_adopted():
    a, b = DMPair((1, 2), (3,), 10), DMPair((1, 3), (2,), 10)
    game = BernoulliGame(lambda dm: 0.8 if dm == b else 0.3)
    wins = 0
    for seed in range(60):
        state = communication_phase(game, (a, b), 500, np.random.default_rng(seed))
        wins += state.best_arm() == ALTERNATIVE
        assert all(0.0 <= q <= 1.0 for q in state.q_values)
    assert wins >= 57


class ComplexityGame:
    """Deterministic stub: simpler grammars always pay more."""

    def pretrain(self, dm, epochs, rng):
        return 1.0

    def play(self, dm, rng):
        return math.exp(-avg_ms_complexity_dm(dm, SUPPORT))

    def accuracy(self, dm):
        return 1.0


def test_stub_trajectory_never_gets_worse():
    cfg = EvolutionConfig(max_steps=15, inner_iterations=200, pretrain_epochs=0)
    records = run_evolution(starting_pair(2), cfg, 3, ComplexityGame())
    avgs = [r.avg_ms_complexity for r in records]
    assert all(b <= a + 1e-12 for a, b in zip(avgs, avgs[1:]))
    assert avgs[-1] < avgs[0]
    for r in records:
        assert covers(r.dm) and covers(r.dm.with_range(99))
        assert r.avg_ms_complexity == avg_ms_complexity_dm(r.dm, SUPPORT)


def test_adopted_grammar_is_argmax():
    cfg = EvolutionConfig(max_steps=10, inner_iterations=50, pretrain_epochs=0)
    game = BernoulliGame(lambda dm: 1.0 / avg_ms_complexity_dm(dm, SUPPORT), draws=4)
    records = run_evolution(starting_pair(7), cfg, 5, game)
    for prev, rec in zip(records, records[1:]):
        q0, q1 = rec.q_final
        assert (rec.dm != prev.dm) == (q1 > q0)


def test_zero_steps():
    cfg = EvolutionConfig(max_steps=0, pretrain_epochs=0)
    records = run_evolution(starting_pair(2), cfg, 0, BernoulliGame(lambda dm: 0.5))
    assert len(records) == 1 and records[0].dm == starting_pair(2)
    text = trajectory_to_csv(records)
    assert text.splitlines()[0] == ",".join(TRAJECTORY_FIELDS)
    assert len(text.splitlines()) == 2


def test_rejects_uncovering_start():
    with pytest.raises(ValueError):
        run_evolution(DMPair((2,), (3,), 10), EvolutionConfig(max_steps=1), 0, BernoulliGame(lambda dm: 0.5))


def test_agent_range_must_match():
    cfg = EvolutionConfig(max_steps=0, pretrain_epochs=0, agent=AgentConfig(numeral_range=20, hidden_dim=4))
    with pytest.raises(ValueError):
        run_evolution(starting_pair(2), cfg, 0)


def test_agent_run_is_reproducible(tmp_path):
    agent = AgentConfig(hidden_dim=8, embedding_dim=4, message_alphabet_size=8, numeral_range=50)
    cfg = EvolutionConfig(max_steps=2, inner_iterations=5, pretrain_epochs=5, agent=agent)
    a = trajectory_to_csv(run_evolution(starting_pair(7), cfg, 1))
    b = trajectory_to_csv(run_evolution(starting_pair(7), cfg, 1))
    assert a == b
    assert len(a.splitlines()) == 4
