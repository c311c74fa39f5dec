"""``bnsl`` command line: infer, score, simulate, evaluate, benchmark, enumerate.

Exit codes: 0 ok, 2 usage/config error, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from .dag import Dag, GraphError, InvariantViolation, topological_order
from .evaluation import (
    ContextResult,
    EvaluationError,
    GoldStandard,
    evaluate_context,
    load_gold,
    mean_rank,
    save_gold,
    write_mean_ranks,
    write_results,
)
from .io import load_dataset, load_network, read_edge_labels, save_dataset, save_network
from .scoring import DEFAULT_MAX_PARENTS, DataError, ScoreKind, Scorer
from .search import (
    GaConfig,
    HcConfig,
    TabuConfig,
    evolve,
    exhaustive_best,
    hill_climb,
    tabu_search,
)
from .search.exhaustive import MAX_EXHAUSTIVE_NODES
from .simulate import generate_insilico_like, save_metadata, save_truth

log = logging.getLogger("bnsl")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 2, 3, 4
METHODS = ("hc", "tabu", "ga")
SCORES = ("loglik", "aic", "bic")
METHOD_TITLES = {"hc": "HC", "tabu": "TB", "ga": "GA"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    method: str = "hc"
    score: str = "bic"
    seed: int = 0
    max_parents: int = DEFAULT_MAX_PARENTS
    # hill climbing / tabu
    restarts: int = 10
    max_iterations: int = 10_000
    init: str = "empty"
    edge_prob: float | None = None
    tenure: int = 10
    no_improve_window: int | None = None
    tabu_max_iterations: int | None = None
    # genetic algorithm
    population_size: int = 100
    generations: int = 100
    tournament_size: int = 3
    crossover_rate: float = 0.9
    mutation_prob: float | None = None
    elitism_count: int = 2
    crossover_conflict_policy: str = "paper"

    def validate(self) -> "RunConfig":
        if self.method not in METHODS:
            raise ConfigError(f"method: expected one of {', '.join(METHODS)}, got {self.method!r}")
        if self.score not in SCORES:
            raise ConfigError(f"score: expected one of {', '.join(SCORES)}, got {self.score!r}")
        if self.max_parents < 0:
            raise ConfigError("max_parents must be >= 0")
        try:
            self.hc_config()
            self.tabu_config()
            self.ga_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def hc_config(self) -> HcConfig:
        return HcConfig(self.max_iterations, self.restarts, self.init, self.edge_prob, self.seed)

    def tabu_config(self) -> TabuConfig:
        return TabuConfig(
            self.tenure, self.no_improve_window, self.tabu_max_iterations,
            self.restarts, self.init, self.edge_prob, self.seed,
        )

    def ga_config(self) -> GaConfig:
        return GaConfig(
            self.population_size, self.generations, self.tournament_size,
            self.crossover_rate, self.mutation_prob, self.elitism_count, self.seed,
            self.crossover_conflict_policy, self.edge_prob,
        )


CONFIG_KEYS = {f.name: f for f in fields(RunConfig)}


def load_config_file(path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"--config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config {path}: invalid JSON ({exc})") from None
    if isinstance(raw, dict) and "manifest_version" in raw:
        raw = raw.get("config", {})
    if not isinstance(raw, dict):
        raise ConfigError(f"--config {path}: expected a JSON object")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"--config {path}: unknown key(s) {', '.join(unknown)}")
    return raw


def build_config(args) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        values.update(load_config_file(args.config))
    for name in CONFIG_KEYS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    try:
        cfg = RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def run_method(data, cfg: RunConfig, method: str | None = None, score: str | None = None):
    method = method or cfg.method
    scorer = Scorer(data, ScoreKind.parse(score or cfg.score), cfg.max_parents)
    if method == "hc":
        return hill_climb(data, scorer.kind, cfg.hc_config(), scorer=scorer)
    if method == "tabu":
        return tabu_search(data, scorer.kind, cfg.tabu_config(), scorer=scorer)
    return evolve(data, scorer.kind, cfg.ga_config(), scorer=scorer)


def _check_dag(dag: Dag) -> None:
    topological_order(dag)
    if not dag.index.consistent_with(dag.adj):
        raise InvariantViolation("reachability index out of sync with adjacency")


def _sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands -------------------------------------------------------------


def cmd_infer(args) -> int:
    cfg = build_config(args)
    data = load_dataset(args.dataset)
    out = _out_dir(args)
    t0 = time.perf_counter()
    dag, trace = run_method(data, cfg)
    elapsed = time.perf_counter() - t0
    _check_dag(dag)
    score = Scorer(data, cfg.score, cfg.max_parents).score(dag)
    save_network(dag, out / "network.txt", out / "adjacency.csv")
    with open(out / "trace.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["restart", "iteration", "move", "score", "best", "aspiration"])
        w.writerows(trace.rows())
    _write_json(out / "manifest.json", {
        "manifest_version": 1,
        "command": "infer",
        "config": dataclasses.asdict(cfg),
        "dataset": str(args.dataset),
        "dataset_sha256": _sha256(args.dataset),
        "score": score,
        "n_edges": dag.n_edges(),
        "evaluations": trace.evaluations,
    })
    _write_json(out / "timing.json", {"wall_time_s": elapsed})
    print(f"{score:.6f}")
    return EXIT_OK


def cmd_score(args) -> int:
    kind = ScoreKind.parse(args.score)
    data = load_dataset(args.dataset)
    dag = load_network(args.network, data.labels)
    max_parents = args.max_parents if args.max_parents is not None else data.n_vars
    print(f"{Scorer(data, kind, max_parents).score(dag):.6f}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    truth, data, gold = generate_insilico_like(args.seed, n_nodes=args.n_nodes)
    _check_dag(truth.dag)
    save_dataset(data, out / "data.csv")
    save_metadata(out / "metadata.csv")
    save_truth(truth, out / "truth_network.txt", out / "truth_params.csv")
    save_gold(gold, out / "gold.txt")
    print(f"{data.n_obs}x{data.n_vars} dataset written to {out / 'data.csv'}")
    return EXIT_OK


def _networks_for_gold(paths, gold: GoldStandard) -> list[Dag]:
    labels = gold.node_labels()
    extra = []
    for p in paths:
        for a, b in read_edge_labels(p):
            for x in (a, b):
                if x not in labels and x not in extra:
                    extra.append(x)
    if extra:
        raise DataError(f"network label(s) not in gold standard: {', '.join(extra)}")
    return [load_network(p, labels) for p in paths]


def cmd_evaluate(args) -> int:
    gold = load_gold(args.gold)
    nets = _networks_for_gold(args.networks, gold)
    res = evaluate_context(nets, gold, args.context, args.method_name)
    out = _out_dir(args)
    write_results([res], out / "auroc.csv")
    print(f"{res.auroc:.6f}")
    return EXIT_OK


def _context_names(paths) -> list[str]:
    stems = [Path(p).stem for p in paths]
    if len(set(stems)) == len(stems):
        return stems
    return [f"{i}_{s}" for i, s in enumerate(stems)]


def heatmap_table(results: list[ContextResult]) -> str:
    contexts = list(dict.fromkeys(r.context for r in results))
    cell = {(r.context, r.method): r.auroc for r in results}
    blocks = []
    for title, ctxs in [(c, [c]) for c in contexts] + [("mean", contexts)]:
        lines = [f"[{title}]", f"{'':<4}" + "".join(f"{s:>9}" for s in SCORES)]
        for m in METHODS:
            row = []
            for s in SCORES:
                vals = [cell.get((c, f"{m}-{s}")) for c in ctxs]
                vals = [v for v in vals if v is not None]
                row.append(f"{sum(vals) / len(vals):9.3f}" if vals else f"{'-':>9}")
            lines.append(f"{METHOD_TITLES[m]:<4}" + "".join(row))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def cmd_benchmark(args) -> int:
    if len(args.data) != len(args.gold):
        raise ConfigError("--data and --gold need the same number of files")
    cfg = build_config(args)
    out = _out_dir(args)
    results: list[ContextResult] = []
    failed = []
    for ctx, dpath, gpath in zip(_context_names(args.data), args.data, args.gold):
        try:
            data = load_dataset(dpath)
            gold = load_gold(gpath)
            if gold.intervention not in data.labels:
                raise EvaluationError(f"intervention {gold.intervention!r} not in {dpath}")
            rows = []
            for m in METHODS:
                for s in SCORES:
                    _, trace = run_method(data, cfg, m, s)
                    rows.append(evaluate_context(trace.finals, gold, ctx, f"{m}-{s}"))
            results.extend(rows)
        except (DataError, EvaluationError, GraphError, OSError) as exc:
            print(f"context {ctx}: {exc}", file=sys.stderr)
            failed.append(ctx)
    write_results(results, out / "results.csv")
    if results:
        write_mean_ranks(mean_rank(results), out / "mean_rank.csv")
        (out / "heatmap.txt").write_text(heatmap_table(results), encoding="utf-8")
        sys.stdout.write(heatmap_table(results))
    if failed:
        print(f"{len(failed)} context(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def cmd_enumerate(args) -> int:
    kind = ScoreKind.parse(args.score)
    data = load_dataset(args.dataset)
    if data.n_vars > MAX_EXHAUSTIVE_NODES:
        raise ConfigError(
            f"enumerate supports at most {MAX_EXHAUSTIVE_NODES} variables, dataset has {data.n_vars}"
        )
    max_parents = args.max_parents if args.max_parents is not None else DEFAULT_MAX_PARENTS
    dag, score = exhaustive_best(data, kind, max_parents=max_parents)
    out = _out_dir(args)
    save_network(dag, out / "network.txt", out / "adjacency.csv")
    _write_json(out / "manifest.json", {
        "manifest_version": 1,
        "command": "enumerate",
        "dataset": str(args.dataset),
        "dataset_sha256": _sha256(args.dataset),
        "score_kind": kind.value,
        "max_parents": max_parents,
        "score": score,
    })
    print(f"{score:.6f}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------


def _add_run_flags(p: argparse.ArgumentParser, with_method: bool = True) -> None:
    if with_method:
        p.add_argument("--method", choices=METHODS)
        p.add_argument("--score", choices=SCORES)
    p.add_argument("--seed", type=int)
    p.add_argument("--max-parents", dest="max_parents", type=int)
    p.add_argument("--config", help="JSON file of run settings (flags override it)")
    g = p.add_argument_group("hill climbing / tabu")
    g.add_argument("--restarts", type=int)
    g.add_argument("--max-iterations", dest="max_iterations", type=int)
    g.add_argument("--init", choices=("empty", "random"))
    g.add_argument("--edge-prob", dest="edge_prob", type=float)
    g.add_argument("--tenure", type=int)
    g.add_argument("--no-improve-window", dest="no_improve_window", type=int)
    g.add_argument("--tabu-max-iterations", dest="tabu_max_iterations", type=int)
    g = p.add_argument_group("genetic algorithm")
    g.add_argument("--population-size", dest="population_size", type=int)
    g.add_argument("--generations", type=int)
    g.add_argument("--tournament-size", dest="tournament_size", type=int)
    g.add_argument("--crossover-rate", dest="crossover_rate", type=float)
    g.add_argument("--mutation-prob", dest="mutation_prob", type=float)
    g.add_argument("--elitism-count", dest="elitism_count", type=int)
    g.add_argument("--crossover-conflict-policy", dest="crossover_conflict_policy",
                   choices=("paper", "swapped"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnsl", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", help="learn a network from a dataset")
    p.add_argument("dataset")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    _add_run_flags(p)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("score", help="score a network on a dataset")
    p.add_argument("dataset")
    p.add_argument("network")
    p.add_argument("--score", choices=SCORES, default="bic")
    p.add_argument("--max-parents", dest="max_parents", type=int)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("simulate", help="write a synthetic in-silico-like context")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--n-nodes", dest="n_nodes", type=int, default=20)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="descendant AUROC of network(s) against a gold standard")
    p.add_argument("networks", nargs="+")
    p.add_argument("--gold", required=True)
    p.add_argument("--context", default="context")
    p.add_argument("--method-name", dest="method_name", default="ensemble")
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="run every method x score over several contexts")
    p.add_argument("--data", nargs="+", required=True)
    p.add_argument("--gold", nargs="+", required=True)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    _add_run_flags(p, with_method=False)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("enumerate", help="exhaustive optimum for <= 5 variables")
    p.add_argument("dataset")
    p.add_argument("--score", choices=SCORES, default="bic")
    p.add_argument("--max-parents", dest="max_parents", type=int)
    p.add_argument("--out-dir", dest="out_dir", default=".")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"bnsl {args.command}: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, EvaluationError, GraphError) as exc:
        print(f"bnsl {args.command}: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvariantViolation as exc:
        print(f"bnsl {args.command}: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        log.debug("unhandled", exc_info=True)
        print(f"bnsl {args.command}: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
