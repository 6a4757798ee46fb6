"""Experiment configuration: one JSON document per run, echoed next to its outputs."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, is_dataclass
from pathlib import Path

from numeralgame.agents import AgentConfig
from numeralgame.evolution import EvolutionConfig
from numeralgame.pareto import GAConfig

# Reduced settings under which the acceptance runs fit on a single CPU core.
# The optimiser settings differ from the full-scale defaults: at 2000 epochs
# the slower defaults leave the agents stuck communicating only the numeral 1.
DESK_AGENT = dict(hidden_dim=32, pretrain_epochs=2000, learning_rate=0.01, entropy_coefficient=0.1,
                  speaker_entropy=0.01, message_alphabet_size=20, embedding_init_std=1.0)
DESK_EVOLUTION = dict(inner_iterations=2000, pretrain_epochs=2000, max_steps=30)


@dataclass
class ExperimentConfig:
    seed: int = 0
    range_max: int = 50  # communication range 1..range_max
    support_max: int = 99  # metric support 1..support_max
    ga: GAConfig = field(default_factory=GAConfig)
    evolution: EvolutionConfig = field(default_factory=EvolutionConfig)
    out: str = "out"

    def __post_init__(self):
        if self.range_max < 1 or self.support_max < 1:
            raise ValueError("range_max and support_max must be positive")
        self.sync()

    def sync(self):
        """Propagate the shared range/support bounds into the nested sections."""
        self.ga.range_max = self.support_max
        self.ga.support_max = self.support_max
        self.evolution.support_max = self.support_max
        self.evolution.agent.numeral_range = self.range_max

    def apply_desk_scale(self):
        for k, v in DESK_AGENT.items():
            setattr(self.evolution.agent, k, v)
        for k, v in DESK_EVOLUTION.items():
            setattr(self.evolution, k, v)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def write(self, directory: str | Path) -> Path:
        path = Path(directory) / "config.json"
        path.write_text(self.to_json())
        return path

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        _reject_unknown(cls, d, "config")
        ga = d.pop("ga", {})
        _reject_unknown(GAConfig, ga, "ga")
        ga = GAConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in ga.items()})
        evo = dict(d.pop("evolution", {}))
        _reject_unknown(EvolutionConfig, evo, "evolution")
        agent = evo.pop("agent", {})
        _reject_unknown(AgentConfig, agent, "evolution.agent")
        evolution = EvolutionConfig(agent=AgentConfig(**agent), **evo)
        return cls(ga=ga, evolution=evolution, **d)

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _reject_unknown(klass, d: dict, where: str):
    known = {f.name for f in fields(klass)} if is_dataclass(klass) else set()
    extra = sorted(set(d) - known)
    if extra:
        raise ValueError(f"unknown {where} keys: {', '.join(extra)}")
