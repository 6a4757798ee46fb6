"""Pareto frontier of lexicon size vs. average complexity, estimated by a GA.

Both objectives are minimised.  Average complexities closer than
``OBJECTIVE_TOL`` are treated as equal so rounding never flips dominance.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from numeralgame.grammar import DMPair
from numeralgame.lexicon import minimal_costs
from numeralgame.metrics import NeedDistribution, avg_ms_complexity_dm, lexicon_size
from numeralgame.mutation import MutationKind, apply_mutation

OBJECTIVE_TOL = 1e-12
FRONTIER_FIELDS = ("lexicon_size", "avg_ms_complexity", "D", "M")


@dataclass(frozen=True)
class Candidate:
    dm: DMPair
    lexicon_size: int
    avg_complexity: float

    @property
    def objectives(self) -> tuple[int, float]:
        return (self.lexicon_size, self.avg_complexity)

    def sort_key(self):
        return (self.lexicon_size, self.avg_complexity, self.dm.digits, self.dm.multipliers)


def evaluate(dm: DMPair, dist: NeedDistribution) -> Candidate | None:
    """Objectives of ``dm`` on ``dist``'s support; ``None`` if it does not cover it."""
    scored = dm if dm.range_max == dist.n_max else dm.with_range(dist.n_max)
    costs = minimal_costs(scored)
    if not costs.all():
        return None
    return Candidate(dm, lexicon_size(dm), avg_ms_complexity_dm(scored, dist))


def dominates(a: Candidate, b: Candidate) -> bool:
    """``a`` is no worse on both objectives and strictly better on one."""
    size_le = a.lexicon_size <= b.lexicon_size
    avg_le = a.avg_complexity <= b.avg_complexity + OBJECTIVE_TOL
    strictly = a.lexicon_size < b.lexicon_size or a.avg_complexity < b.avg_complexity - OBJECTIVE_TOL
    return size_le and avg_le and strictly


def nondominated(pop: list[Candidate]) -> list[Candidate]:
    """Maximal nondominated subset, one point per objective pair, sorted by size.

    With two objectives a sweep in (size, complexity) order suffices: a point
    survives iff its complexity beats everything of smaller or equal size.
    """
    best = math.inf
    out = []
    for c in sorted(pop, key=Candidate.sort_key):
        if c.avg_complexity < best - OBJECTIVE_TOL:
            out.append(c)
            best = c.avg_complexity
    return out


def _fronts(pop: list[Candidate]) -> list[list[Candidate]]:
    """Successive nondominated layers; duplicates of a layer fall to later layers."""
    rest = sorted(pop, key=Candidate.sort_key)
    layers = []
    while rest:
        layer = nondominated(rest)
        taken = set(id(c) for c in layer)
        rest = [c for c in rest if id(c) not in taken]
        layers.append(layer)
    return layers


def _crowding(layer: list[Candidate]) -> list[float]:
    n = len(layer)
    if n <= 2:
        return [math.inf] * n
    dist = [0.0] * n
    for get in (lambda c: float(c.lexicon_size), lambda c: c.avg_complexity):
        order = sorted(range(n), key=lambda i: (get(layer[i]), layer[i].sort_key()))
        lo, hi = get(layer[order[0]]), get(layer[order[-1]])
        dist[order[0]] = dist[order[-1]] = math.inf
        if hi == lo:
            continue
        for k in range(1, n - 1):
            dist[order[k]] += (get(layer[order[k + 1]]) - get(layer[order[k - 1]])) / (hi - lo)
    return dist


def _truncate(pop: list[Candidate], size: int) -> list[Candidate]:
    kept: list[Candidate] = []
    for layer in _fronts(pop):
        if len(kept) + len(layer) <= size:
            kept.extend(layer)
            continue
        crowd = _crowding(layer)
        order = sorted(range(len(layer)), key=lambda i: (-crowd[i], layer[i].sort_key()))
        kept.extend(layer[i] for i in order[: size - len(kept)])
        break
    return kept


@dataclass
class GAConfig:
    population_size: int = 200
    generations: int = 100
    mutations_per_offspring_max: int = 3
    range_max: int = 99
    support_max: int = 99
    init_digits: tuple[int, int] = (1, 12)
    init_multipliers: tuple[int, int] = (0, 5)
    # "need": members drawn with probability ∝ need; "uniform": equal weights.
    init_sampling: str = "need"
    # fresh random grammars injected each generation, as a fraction of population_size
    immigrant_fraction: float = 0.1
    max_init_attempts: int = 200_000


@dataclass
class FrontierApproximation:
    points: list[Candidate]
    config: dict = field(default_factory=dict)
    seed: int | None = None

    def __post_init__(self):
        self.points = sorted(self.points, key=Candidate.sort_key)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def at_size(self, size: int) -> Candidate | None:
        for c in self.points:
            if c.lexicon_size == size:
                return c
        return None


def random_dm(rng: np.random.Generator, config: GAConfig, dist: NeedDistribution) -> Candidate:
    """Rejection-sample a grammar that covers the support."""
    pool = np.arange(1, config.range_max + 1)
    if config.init_sampling == "need":
        p = NeedDistribution(config.range_max, dist.exponent).weights
    elif config.init_sampling == "uniform":
        p = None
    else:
        raise ValueError(f"unknown init_sampling {config.init_sampling!r}")
    for _ in range(config.max_init_attempts):
        n_d = int(rng.integers(config.init_digits[0], config.init_digits[1] + 1))
        n_m = int(rng.integers(config.init_multipliers[0], config.init_multipliers[1] + 1))
        members = rng.choice(pool, size=n_d + n_m, replace=False, p=p)
        dm = DMPair(tuple(members[:n_d].tolist()), tuple(members[n_d:].tolist()), config.range_max)
        cand = evaluate(dm, dist)
        if cand is not None:
            return cand
    raise RuntimeError(f"no covering grammar after {config.max_init_attempts} draws")


def _mutate(dm: DMPair, rng: np.random.Generator, max_mutations: int) -> DMPair | None:
    for _ in range(int(rng.integers(1, max_mutations + 1))):
        dm = apply_mutation(dm, MutationKind(int(rng.integers(len(MutationKind)))))
        if dm is None:
            return None
    return dm


def run_ga(config: GAConfig | None = None, rng: np.random.Generator | int | None = None,
           initial: list[DMPair] | None = None) -> FrontierApproximation:
    """Estimate the frontier with a mutation-only elitist GA.

    Each generation draws ``population_size`` offspring from uniformly chosen
    nondominated parents, each via 1..``mutations_per_offspring_max`` random
    modifications; offspring that do not cover the support are dropped.
    Parents and offspring are merged and cut back to ``population_size`` by
    nondominated layers, breaking the last layer by crowding distance.
    """
    config = config or GAConfig()
    seed = rng if isinstance(rng, int) else None
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    dist = NeedDistribution(config.support_max)

    population: dict[DMPair, Candidate] = {}
    if initial is not None:
        for dm in initial:
            cand = evaluate(dm, dist)
            if cand is not None:
                population[dm] = cand
    else:
        attempts = 0
        while len(population) < config.population_size:
            cand = random_dm(rng, config, dist)
            population.setdefault(cand.dm, cand)
            attempts += 1
            if attempts > 50 * config.population_size:
                break

    pop = sorted(population.values(), key=Candidate.sort_key)
    for _ in range(config.generations):
        parents = nondominated(pop)
        merged = {c.dm: c for c in pop}
        for _ in range(config.population_size):
            parent = parents[int(rng.integers(len(parents)))]
            child = _mutate(parent.dm, rng, config.mutations_per_offspring_max)
            if child is None or child in merged:
                continue
            cand = evaluate(child, dist)
            if cand is not None:
                merged[child] = cand
        for _ in range(int(round(config.immigrant_fraction * config.population_size))):
            cand = random_dm(rng, config, dist)
            merged.setdefault(cand.dm, cand)
        pop = _truncate(list(merged.values()), config.population_size)

    return FrontierApproximation(nondominated(pop), asdict(config), seed)


def _segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + t * ab)))


def distance_to_frontier(c: Candidate | tuple[float, float], frontier) -> float:
    """Euclidean distance from ``c`` to the frontier's piecewise-linear interpolation.

    Both axes are min-max normalised over the frontier points plus ``c``.
    """
    points = list(frontier.points if isinstance(frontier, FrontierApproximation) else frontier)
    if not points:
        raise ValueError("empty frontier")
    xy = np.array([[p.lexicon_size, p.avg_complexity] if isinstance(p, Candidate) else p for p in points],
                  dtype=np.float64)
    xy = xy[np.argsort(xy[:, 0], kind="stable")]
    target = np.array(c.objectives if isinstance(c, Candidate) else c, dtype=np.float64)
    allpts = np.vstack([xy, target])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    xy = (xy - lo) / span
    target = (target - lo) / span
    if len(xy) == 1:
        return float(np.linalg.norm(target - xy[0]))
    return min(_segment_distance(target, xy[i], xy[i + 1]) for i in range(len(xy) - 1))


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def frontier_rows(points) -> list[dict]:
    return [
        {
            "lexicon_size": c.lexicon_size,
            "avg_ms_complexity": _fmt(c.avg_complexity),
            "D": ";".join(map(str, c.dm.digits)),
            "M": ";".join(map(str, c.dm.multipliers)),
        }
        for c in points
    ]


def frontier_to_csv(frontier: FrontierApproximation, path: str | Path | None = None) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=FRONTIER_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(frontier_rows(frontier.points))
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def _int_list(field_text: str) -> tuple[int, ...]:
    field_text = field_text.strip()
    return tuple(int(x) for x in field_text.split(";")) if field_text else ()


def read_frontier_csv(path: str | Path, range_max: int = 99) -> list[Candidate]:
    """Parse a frontier CSV back into candidates (objectives taken from the file)."""
    text = Path(path).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not set(FRONTIER_FIELDS) <= set(reader.fieldnames):
        raise ValueError(f"{path}: expected columns {','.join(FRONTIER_FIELDS)}")
    out = []
    for i, row in enumerate(reader, start=2):
        try:
            digits, mults = _int_list(row["D"]), _int_list(row["M"])
            top = max(digits + mults + (range_max,))
            out.append(Candidate(DMPair(digits, mults, top), int(row["lexicon_size"]),
                                 float(row["avg_ms_complexity"])))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}:{i}: malformed row: {exc}") from None
    return out
