"""Finite-difference check of the analytic REINFORCE surrogate gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from numeralgame.agents import AgentConfig, AgentPair, Vocabulary, play_batch, surrogate_gradients, surrogate_losses
from numeralgame.grammar import DMPair
from numeralgame.lexicon import compute_lmin
from numeralgame.metrics import NeedDistribution


@dataclass
class GradCheckResult:
    seed: int
    speaker_rel_error: float
    listener_rel_error: float

    @property
    def worst(self) -> float:
        return max(self.speaker_rel_error, self.listener_rel_error)


def _rel_error(a: np.ndarray, b: np.ndarray) -> float:
    denom = np.linalg.norm(a) + np.linalg.norm(b)
    return 0.0 if denom == 0 else float(np.linalg.norm(a - b) / denom)


def check_gradients(seed: int, hidden_dim: int = 4, alphabet: int = 3, batch_size: int = 8,
                    eps: float = 1e-6, speaker_entropy: float = 0.03) -> GradCheckResult:
    """Compare analytic and central-difference gradients on a tiny agent pair.

    Parameters are redrawn with a wider spread than the training init and
    rewards are randomised, so every term of the surrogate contributes.
    """
    rng = np.random.default_rng(seed)
    config = AgentConfig(embedding_dim=3, hidden_dim=hidden_dim, message_alphabet_size=alphabet,
                         numeral_range=10, entropy_coefficient=0.05, speaker_entropy=speaker_entropy)
    pair = AgentPair(config, seed, Vocabulary(10))
    for policy in (pair.speaker, pair.listener):
        policy.set_theta(rng.normal(0.0, 0.5, policy.theta.size))
    lexicon = compute_lmin(DMPair((1, 2, 3), (4,), 10))
    batch = play_batch(pair.speaker, pair.listener, lexicon, NeedDistribution(10), rng, batch_size)
    batch.rewards = rng.integers(0, 2, batch_size).astype(np.float64)
    baseline = float(batch.rewards.mean())

    def losses():
        return surrogate_losses(pair.speaker, pair.listener, batch, config.entropy_coefficient,
                                baseline, speaker_entropy)

    analytic = surrogate_gradients(pair.speaker, pair.listener, batch, config.entropy_coefficient,
                                   baseline, speaker_entropy)
    errors = []
    for which, policy in enumerate((pair.speaker, pair.listener)):
        theta = policy.theta.copy()
        numeric = np.zeros_like(theta)
        for k in range(theta.size):
            for sign in (1.0, -1.0):
                shifted = theta.copy()
                shifted[k] += sign * eps
                policy.set_theta(shifted)
                numeric[k] += sign * losses()[which]
            policy.set_theta(theta)
        numeric /= 2 * eps
        errors.append(_rel_error(analytic[which], numeric))
    return GradCheckResult(seed, *errors)
