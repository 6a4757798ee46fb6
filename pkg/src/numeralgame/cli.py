"""Command-line entry point: ``numeralgame <command> [options]``."""

from __future__ import annotations

import argparse
import collections
import csv
import json
import sys
from pathlib import Path

from numeralgame import svg
from numeralgame.config import ExperimentConfig
from numeralgame.evolution import agent_game, run_evolution, trajectory_to_csv
from numeralgame.grammar import DMPair, render
from numeralgame.lexicon import CoverageError, compute_lmin, covers, uncovered
from numeralgame.metrics import NeedDistribution, avg_ms_complexity_dm, avg_ms_complexity_lexicon, lexicon_size
from numeralgame.pareto import Candidate, distance_to_frontier, frontier_to_csv, read_frontier_csv, run_ga
from numeralgame.reference import HUMAN_SYSTEMS, STARTING_POINTS, human_pair, starting_pair


class UsageError(ValueError):
    pass


def parse_numerals(text: str) -> tuple[int, ...]:
    """``"1..9,11"`` -> ``(1, ..., 9, 11)``; an empty string is the empty set."""
    out: list[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return tuple(out)


def _load_config(args) -> ExperimentConfig:
    cfg = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if getattr(args, "desk_scale", False):
        cfg.apply_desk_scale()
    if args.seed is not None:
        cfg.seed = args.seed
    if args.range is not None:
        cfg.range_max = args.range
    if args.support is not None:
        cfg.support_max = args.support
    if args.out is not None:
        cfg.out = args.out
    cfg.sync()
    return cfg


def _outdir(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg.write(out)
    return out


def _explicit_dm(args, range_max: int) -> DMPair | None:
    if args.D is None:
        if args.M is not None:
            raise UsageError("--M needs --D")
        return None
    try:
        return DMPair(parse_numerals(args.D), parse_numerals(args.M or ""), range_max)
    except ValueError as exc:
        raise UsageError(f"invalid grammar: {exc}") from None


def cmd_analyze(args) -> int:
    range_max = args.range or 99
    support = args.support or range_max
    dm = _explicit_dm(args, range_max)
    if dm is None:
        raise UsageError("analyze needs --D (and optionally --M)")
    if support > range_max:
        raise UsageError(f"--support {support} exceeds --range {range_max}")
    lex = compute_lmin(dm)
    avg = avg_ms_complexity_lexicon(lex, NeedDistribution(support))
    rows = [(n, render(lex[n]), lex.complexity(n)) for n in range(1, range_max + 1)]
    print(f"grammar {dm}")
    print(f"lexicon_size {lexicon_size(dm)}")
    print(f"avg_ms_complexity {avg:.12g}")
    print("n,expression,complexity")
    for n, text, c in rows:
        print(f"{n},{text},{c}")
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "lexicon.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "expression", "complexity"])
            w.writerows(rows)
        summary = {"D": list(dm.digits), "M": list(dm.multipliers), "range_max": range_max,
                   "support_max": support, "lexicon_size": lexicon_size(dm), "avg_ms_complexity": avg}
        (out / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return 0


def _read_overlay(spec: str) -> tuple[str, list[tuple[float, float]], list[str]]:
    if spec == "human":
        dist = NeedDistribution(99)
        names = list(HUMAN_SYSTEMS)
        pts = [(lexicon_size(human_pair(n)), avg_ms_complexity_dm(human_pair(n), dist)) for n in names]
        return "human systems", pts, names
    path = Path(spec)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if not reader.fieldnames or not {"lexicon_size", "avg_ms_complexity"} <= set(reader.fieldnames):
            raise UsageError(f"{path}: overlay needs lexicon_size and avg_ms_complexity columns")
        rows = list(reader)
    pts = [(float(r["lexicon_size"]), float(r["avg_ms_complexity"])) for r in rows]
    return path.stem, pts, []


def _frontier_series(points) -> svg.Series:
    return svg.Series("GA frontier", [(c.lexicon_size, c.avg_complexity) for c in points], line=True)


def cmd_pareto(args) -> int:
    cfg = _load_config(args)
    if args.generations is not None:
        cfg.ga.generations = args.generations
    if args.population is not None:
        cfg.ga.population_size = args.population
    out = _outdir(cfg)
    frontier = run_ga(cfg.ga, cfg.seed)
    frontier_to_csv(frontier, out / "frontier.csv")
    series = [_frontier_series(frontier.points)]
    for spec in args.overlay or []:
        label, pts, notes = _read_overlay(spec)
        series.append(svg.Series(label, pts, line=False, annotations=notes))
    svg.write(out / "frontier.svg", svg.scatter_plot(series, "Estimated Pareto frontier",
                                                     "lexicon size |D|+|M|", "average complexity"))
    print(f"{len(frontier)} frontier points -> {out / 'frontier.csv'}")
    return 0


def _start_dm(args, cfg: ExperimentConfig) -> tuple[DMPair, str]:
    dm = _explicit_dm(args, cfg.range_max)
    if dm is not None:
        if args.start is not None:
            raise UsageError("give either --start or --D/--M, not both")
        return dm, "explicit"
    index = args.start if args.start is not None else 1
    if index not in STARTING_POINTS:
        raise UsageError(f"--start must be in 1..{len(STARTING_POINTS)}")
    return starting_pair(index, cfg.range_max), f"start {index}"


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    if args.max_steps is not None:
        cfg.evolution.max_steps = args.max_steps
    start, label = _start_dm(args, cfg)
    if not covers(start):
        raise CoverageError(uncovered(start), start)
    out = _outdir(cfg)
    game = agent_game(cfg.evolution, cfg.seed)

    def report(rec):
        if not args.quiet:
            print(f"step {rec.step}: {rec.dm} size={rec.lexicon_size} avg={rec.avg_ms_complexity:.4f} "
                  f"acc={rec.accuracy:.3f} {rec.mutation}", flush=True)

    records = run_evolution(start, cfg.evolution, cfg.seed, game, progress=report)
    trajectory_to_csv(records, out / "trajectory.csv")
    game.pair.save(out / "agents.npz", extra={"final_D": list(records[-1].dm.digits),
                                          "final_M": list(records[-1].dm.multipliers)})
    series = []
    if args.frontier:
        frontier = read_frontier_csv(args.frontier, cfg.support_max)
        series.append(_frontier_series(frontier))
        first, last = records[0], records[-1]
        for tag, rec in (("start", first), ("final", last)):
            d = distance_to_frontier(Candidate(rec.dm, rec.lexicon_size, rec.avg_ms_complexity), frontier)
            print(f"{tag} distance_to_frontier {d:.6g}")
    pts = [(r.lexicon_size, r.avg_ms_complexity) for r in records]
    notes = ["start"] + [""] * (len(pts) - 2) + ["end"] if len(pts) > 1 else ["start"]
    series.append(svg.Series(f"trajectory ({label})", pts, line=True, annotations=notes))
    svg.write(out / "trajectory.svg", svg.scatter_plot(series, "Grammar trajectory",
                                                       "lexicon size |D|+|M|", "average complexity"))
    print(f"{len(records)} records -> {out / 'trajectory.csv'}")
    return 0


def m_histogram(frontier: list[Candidate]) -> list[tuple[int, int]]:
    if not frontier:
        raise ValueError("frontier is empty")
    counts = collections.Counter(len(c.dm.multipliers) for c in frontier)
    return sorted(counts.items())


def cmd_report_m(args) -> int:
    frontier = read_frontier_csv(args.frontier)
    hist = m_histogram(frontier)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "m_cardinality.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m_size", "count"])
        w.writerows(hist)
    svg.write(out / "m_cardinality.svg",
              svg.bar_chart([str(k) for k, _ in hist], [v for _, v in hist],
                            "Frontier points by |M|", "|M|", "count"))
    total = sum(v for _, v in hist)
    for k, v in hist:
        print(f"|M|={k}: {v} ({v / total:.1%})")
    return 0


def cmd_gradcheck(args) -> int:
    from numeralgame.gradcheck import check_gradients

    worst = 0.0
    for seed in range(args.seeds):
        r = check_gradients(seed)
        worst = max(worst, r.worst)
        print(f"seed {seed}: speaker {r.speaker_rel_error:.3e} listener {r.listener_rel_error:.3e}")
    ok = worst < args.tolerance
    print(f"{'PASS' if ok else 'FAIL'} worst relative error {worst:.3e} (tolerance {args.tolerance:g})")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="numeralgame", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        p.add_argument("--seed", type=int)
        p.add_argument("--range", type=int, help="communication range 1..RANGE")
        p.add_argument("--support", type=int, help="metric support 1..SUPPORT")
        p.add_argument("--out", help="output directory")
        if config:
            p.add_argument("--config", help="JSON experiment config; flags override it")

    p = sub.add_parser("analyze", help="minimal lexicon and objectives of one grammar")
    common(p, config=False)
    p.add_argument("--D", required=True, help="digits, e.g. 1..9,11")
    p.add_argument("--M", default="", help="multipliers, e.g. 10")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("pareto", help="estimate the frontier with the GA")
    common(p)
    p.add_argument("--overlay", action="append", help="CSV with lexicon_size,avg_ms_complexity, or 'human'")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int)
    p.set_defaults(func=cmd_pareto)

    p = sub.add_parser("evolve", help="evolve a grammar through the signalling game")
    common(p)
    p.add_argument("--start", type=int, help=f"starting point 1..{len(STARTING_POINTS)}")
    p.add_argument("--D")
    p.add_argument("--M")
    p.add_argument("--max-steps", type=int)
    p.add_argument("--desk-scale", action="store_true", help="reduced configuration for one CPU core")
    p.add_argument("--frontier", help="frontier CSV to draw under the trajectory")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("report-m", help="histogram of |M| over frontier points")
    p.add_argument("frontier", help="frontier CSV")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report_m)

    p = sub.add_parser("gradcheck", help="finite-difference check of the policy gradients")
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--tolerance", type=float, default=1e-4)
    p.set_defaults(func=cmd_gradcheck)
    return parser


def _error_line(exc: BaseException) -> str:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, CoverageError):
        payload["missing"] = exc.missing
    return json.dumps(payload)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(_error_line(exc), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
