"""Grammar evolution: alternate grammar proposals with bandit-judged communication.

Each outer step proposes one neighbouring grammar, lets the agents
communicate with both the current and the proposed grammar while a
two-armed bandit tracks their success, and adopts the arm with the higher
Q-value at the end of the phase.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import numpy as np

from numeralgame.agents import AgentConfig, AgentPair, TokenTable, greedy_accuracy, play_batch, reinforce_update, pretrain
from numeralgame.grammar import DMPair
from numeralgame.lexicon import compute_lmin, covers
from numeralgame.metrics import NeedDistribution, avg_ms_complexity_dm, lexicon_size
from numeralgame.mutation import NoValidNeighbor, sample_alternative

CURRENT, ALTERNATIVE = 0, 1
TRAJECTORY_FIELDS = ("step", "lexicon_size", "avg_ms_complexity", "D", "M",
                     "q_current", "q_alt", "accuracy", "mutation")


@dataclass
class BanditState:
    q_values: list[float] = field(default_factory=lambda: [0.0, 0.0])
    pull_counts: list[int] = field(default_factory=lambda: [0, 0])
    alpha: float = 0.1
    epsilon: float = 0.2
    # True: exploit when the uniform draw lands in the top epsilon mass, as
    # written in the algorithm. False: conventional epsilon-greedy.
    greedy_on_high: bool = True

    def reset(self):
        self.q_values = [0.0, 0.0]
        self.pull_counts = [0, 0]

    def best_arm(self) -> int:
        """Arm with the higher Q-value; a tie keeps the current grammar."""
        return ALTERNATIVE if self.q_values[ALTERNATIVE] > self.q_values[CURRENT] else CURRENT


def select_grammar(state: BanditState, rng: np.random.Generator | None = None, n: float | None = None) -> int:
    """Pick an arm from a uniform draw ``n`` (drawn from ``rng`` when omitted)."""
    if n is None:
        n = float(rng.random())
    greedy = (1.0 - state.epsilon <= n) if state.greedy_on_high else (n < 1.0 - state.epsilon)
    if greedy:
        return state.best_arm()
    counts = state.pull_counts
    return ALTERNATIVE if counts[ALTERNATIVE] < counts[CURRENT] else CURRENT


def q_update(state: BanditState, arm: int, reward: float):
    state.q_values[arm] += state.alpha * (reward - state.q_values[arm])
    state.pull_counts[arm] += 1


class Game(Protocol):
    """What the evolution loop needs from the communicating agents."""

    def pretrain(self, dm: DMPair, epochs: int, rng: np.random.Generator) -> float: ...

    def play(self, dm: DMPair, rng: np.random.Generator) -> float: ...

    def accuracy(self, dm: DMPair) -> float: ...


class AgentGame:
    """Speaker and listener trained on the minimal lexicon of whichever grammar is played."""

    def __init__(self, pair: AgentPair, dist: NeedDistribution):
        self.pair = pair
        self.dist = dist
        self._tables: dict[DMPair, TokenTable] = {}

    def table(self, dm: DMPair) -> TokenTable:
        if dm not in self._tables:
            if len(self._tables) > 64:
                self._tables.clear()
            self._tables[dm] = self.pair.table(compute_lmin(dm))
        return self._tables[dm]

    def pretrain(self, dm, epochs, rng):
        return pretrain(self.pair, self.table(dm), self.dist, epochs, rng)

    def play(self, dm, rng):
        p = self.pair
        batch = play_batch(p.speaker, p.listener, self.table(dm), self.dist, rng, p.config.batch_size)
        reinforce_update(p, batch)
        return batch.mean_reward

    def accuracy(self, dm):
        return greedy_accuracy(self.pair, self.table(dm), self.dist)


class BernoulliGame:
    """Synthetic game: each play returns the success rate of ``draws`` Bernoulli trials.

    ``success`` maps a grammar to its success probability.
    """

    def __init__(self, success: Callable[[DMPair], float], draws: int = 1):
        self.success = success
        self.draws = draws

    def pretrain(self, dm, epochs, rng):
        return self.success(dm)

    def play(self, dm, rng):
        return float((rng.random(self.draws) < self.success(dm)).mean())

    def accuracy(self, dm):
        return self.success(dm)


def agent_game(config: "EvolutionConfig", seed: int | None) -> AgentGame:
    """Fresh agents for a run, seeded from the run's master seed."""
    agent_seed = int(np.random.SeedSequence(seed if seed is not None else 0).generate_state(1)[0])
    return AgentGame(AgentPair(config.agent, agent_seed), NeedDistribution(config.support_max))


def communication_phase(game: Game, grammars: tuple[DMPair, DMPair], iterations: int,
                        rng: np.random.Generator, state: BanditState | None = None) -> BanditState:
    """Run one phase from fresh Q-values; returns the final bandit state."""
    state = state or BanditState()
    state.reset()
    for _ in range(iterations):
        arm = select_grammar(state, rng)
        q_update(state, arm, game.play(grammars[arm], rng))
    return state


@dataclass
class EvolutionConfig:
    max_steps: int = 100
    inner_iterations: int = 40000
    pretrain_epochs: int = 5000
    alpha: float = 0.1
    epsilon: float = 0.2
    greedy_on_high: bool = True
    support_max: int = 99
    agent: AgentConfig = field(default_factory=AgentConfig)


@dataclass
class TrajectoryRecord:
    step: int
    dm: DMPair
    lexicon_size: int
    avg_ms_complexity: float
    mutation: str  # label of the proposed modification, "" when none was proposed
    q_final: tuple[float, float]
    accuracy: float
    seed: int | None = None


def _record(step, dm, dist, mutation, q, accuracy, seed) -> TrajectoryRecord:
    return TrajectoryRecord(step, dm, lexicon_size(dm), avg_ms_complexity_dm(dm, dist),
                            mutation, (float(q[0]), float(q[1])), float(accuracy), seed)


def run_evolution(start: DMPair, config: EvolutionConfig | None = None,
                  rng: np.random.Generator | int | None = None, game: Game | None = None,
                  progress: Callable[[TrajectoryRecord], None] | None = None) -> list[TrajectoryRecord]:
    """Evolve ``start`` for ``config.max_steps`` outer steps.

    ``start.range_max`` is the communication range.  Without ``game`` a fresh
    agent pair is built from ``config.agent`` with the master seed; the
    returned list has one record for the start plus one per outer step.
    """
    config = config or EvolutionConfig()
    seed = rng if isinstance(rng, int) else None
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    dist = NeedDistribution(config.support_max)
    if not covers(start):
        raise ValueError(f"start grammar {start} does not cover 1..{start.range_max}")
    if start.range_max < config.support_max and not covers(start.with_range(config.support_max)):
        raise ValueError(f"start grammar {start} does not cover the metric support 1..{config.support_max}")
    if game is None:
        game = agent_game(config, seed)
    if isinstance(game, AgentGame) and game.pair.config.numeral_range != start.range_max:
        raise ValueError(f"agent numeral_range {game.pair.config.numeral_range} != grammar range {start.range_max}")

    current = start
    acc = game.pretrain(current, config.pretrain_epochs, rng)
    records = [_record(0, current, dist, "", (0.0, 0.0), acc, seed)]
    if progress:
        progress(records[-1])
    state = BanditState(alpha=config.alpha, epsilon=config.epsilon, greedy_on_high=config.greedy_on_high)
    for step in range(1, config.max_steps + 1):
        try:
            kind, alt = sample_alternative(current, rng, also_cover=config.support_max)
        except NoValidNeighbor:
            record = _record(step, current, dist, "", (0.0, 0.0), game.accuracy(current), seed)
        else:
            communication_phase(game, (current, alt), config.inner_iterations, rng, state)
            if state.best_arm() == ALTERNATIVE:
                current = alt
            record = _record(step, current, dist, kind.label, state.q_values,
                             game.accuracy(current), seed)
        records.append(record)
        if progress:
            progress(records[-1])
    return records


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def trajectory_to_csv(records: list[TrajectoryRecord], path: str | Path | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRAJECTORY_FIELDS)
    for r in records:
        writer.writerow([
            r.step, r.lexicon_size, _fmt(r.avg_ms_complexity),
            ";".join(map(str, r.dm.digits)), ";".join(map(str, r.dm.multipliers)),
            _fmt(r.q_final[0]), _fmt(r.q_final[1]),
            _fmt(r.accuracy) if math.isfinite(r.accuracy) else "nan", r.mutation,
        ])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text
