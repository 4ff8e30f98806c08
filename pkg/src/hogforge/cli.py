"""Command-line front door: corpus ingestion, attack runs, transform
golden-checks, metric computation, search-strategy comparison,
control-flow-weight sweeps, and candidate-pool inspection.

Reports are emitted with sorted keys and embed the full configuration,
so an identical (config, corpus, seed) triple in sequential mode
produces byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .config import (LAMBDA_GRID, SEED_ENV_VAR, STREAM_GA, STREAM_MHM,
                     STREAM_RANDOM, STREAM_SWARM, RunConfig, resolve_seed,
                     rng_stream)
from .errors import (ConfigError, DuplicateId, HogforgeError,
                     InapplicableTransform, NoAttempts, NoVulnerableSamples,
                     PopulationTooSmall, SchemaError)
from .frontend.lexer import MiniCSyntaxError
from .frontend.unit import parse_unit
from .lexicon import (EmbeddingProvider, build_pool, harvest_vocabulary,
                      load_vocabulary)
from .metrics import apq, asr, cad, cad_raw_chars, codebleu, delta_drop, fnr
from .orchestrator import AttackTask, GlobalQueryPool, QueryGate, attack
from .swarm import (STRATEGY_GA, STRATEGY_GREEDY, STRATEGY_MHM,
                    STRATEGY_PSO, STRATEGY_RANDOM, ALL_STRATEGIES,
                    run_strategy)
from .transforms import (KIND_TO_OP, TransformOp, applicable_sites,
                         apply_transform)
from .victims import make_victim

OP_TO_KIND = {op: kind for kind, op in KIND_TO_OP.items()}

_STRATEGY_STREAM = {
    STRATEGY_PSO: STREAM_SWARM,
    STRATEGY_MHM: STREAM_MHM,
    STRATEGY_GREEDY: STREAM_SWARM,
    STRATEGY_GA: STREAM_GA,
    STRATEGY_RANDOM: STREAM_RANDOM,
}


# -- serialization helpers ------------------------------------------------

def _plain(value):
    """Coerce report trees to JSON-native types (numpy scalars included)."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if hasattr(value, "item"):
        return value.item()
    return str(value)


def _dump_json(payload: dict) -> str:
    return json.dumps(_plain(payload), indent=2, sort_keys=True) + "\n"


def emit_report(payload: dict, path: str | None) -> None:
    text = _dump_json(payload)
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def outcome_to_dict(outcome) -> dict:
    return {
        "sample_id": outcome.sample_id,
        "status": outcome.status,
        "success": outcome.success,
        "skipped": outcome.skipped,
        "true_label": outcome.true_label,
        "final_label": outcome.final_label,
        "p_orig": outcome.p_orig,
        "p_adv": outcome.p_adv,
        "delta_drop": outcome.delta_drop,
        "queries_used": outcome.queries_used,
        "budget_exhausted": outcome.budget_exhausted,
        "adversarial_code": outcome.adversarial_code,
        "substitution": dict(sorted(outcome.substitution.items())),
        "transforms": [{"op": str(op.op), "site": int(op.site)}
                       for op in outcome.transforms],
        "channel_trace": outcome.channel_trace,
    }


# -- ingestion ------------------------------------------------------------

def _validate_row(row) -> tuple:
    if not isinstance(row, dict):
        raise SchemaError("line is not a JSON object")
    rid = row.get("id")
    if not isinstance(rid, str) or not rid:
        raise SchemaError("missing or non-string 'id'")
    code = row.get("code")
    if not isinstance(code, str) or not code:
        raise SchemaError("missing or non-string 'code'")
    label = row.get("label")
    if label not in (0, 1):
        raise SchemaError("'label' must be 0 or 1")
    inputs = row.get("inputs", [])
    if inputs is None:
        inputs = []
    if not isinstance(inputs, list) or any(
            not isinstance(vec, list)
            or any(not isinstance(v, int) or isinstance(v, bool) for v in vec)
            for vec in inputs):
        raise SchemaError("'inputs' must be an array of integer arrays")
    return rid, code, label, inputs


def ingest(path: str) -> tuple:
    """Corpus JSONL to ordered sample rows plus per-line error records.

    Schema violations and unparseable code skip the line and record why;
    a duplicate id poisons the whole report and is fatal.
    """
    try:
        with open(path, "r", encoding="utf-8") as f:
            lines = f.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}")
    rows, errors, seen = [], [], set()
    for number, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append({"line": number, "id": None,
                           "error": f"invalid JSON: {exc}"})
            continue
        try:
            rid, code, label, inputs = _validate_row(raw)
        except SchemaError as exc:
            rid = raw.get("id") if isinstance(raw, dict) else None
            errors.append({"line": number,
                           "id": rid if isinstance(rid, str) else None,
                           "error": str(exc)})
            continue
        if rid in seen:
            raise DuplicateId(f"duplicate sample id {rid!r} at line {number}")
        seen.add(rid)
        try:
            unit = parse_unit(code, unit_id=rid)
        except MiniCSyntaxError as exc:
            errors.append({"line": number, "id": rid,
                           "error": f"unparseable: {exc}"})
            continue
        rows.append({"id": rid, "label": label, "unit": unit,
                     "inputs": inputs})
    return rows, errors


# -- configuration --------------------------------------------------------

def _seed_override(explicit: int | None) -> int | None:
    """Explicit flag wins, then the environment; None leaves the config
    file's (or default) seed in place."""
    if explicit is not None:
        return explicit
    if os.environ.get(SEED_ENV_VAR) is not None:
        return resolve_seed(None)
    return None


def load_config(args) -> RunConfig:
    base = RunConfig.from_file(args.config) if getattr(args, "config", None) \
        else RunConfig()
    cfg = base.with_overrides(
        seed=_seed_override(getattr(args, "seed", None)),
        budget=getattr(args, "budget", None),
        control_flow_weight=getattr(args, "lambda_", None),
        victim=getattr(args, "victim", None),
        jobs=getattr(args, "jobs", None),
        global_budget=getattr(args, "global_budget", None),
        vocab_path=getattr(args, "vocab", None),
        embeddings_path=getattr(args, "embeddings", None),
        timings=True if getattr(args, "timings", False) else None,
    )
    if cfg.global_budget is not None and cfg.jobs != 1:
        raise ConfigError("a shared global budget requires --jobs 1")
    return cfg


def resolve_lexicon(cfg: RunConfig, units: list) -> tuple:
    if cfg.vocab_path:
        vocabulary = load_vocabulary(cfg.vocab_path)
    else:
        vocabulary = harvest_vocabulary(units)
    if cfg.embeddings_path:
        provider = EmbeddingProvider.from_vector_file(cfg.embeddings_path)
    else:
        provider = EmbeddingProvider.subword_hash()
    return vocabulary, provider


# -- attack pipeline ------------------------------------------------------

def execute_attack(cfg: RunConfig, rows: list, vocabulary: list,
                   provider) -> list:
    tasks = [AttackTask(unit=row["unit"], true_label=row["label"],
                        budget=cfg.budget, config=cfg, sample_id=row["id"])
             for row in rows]
    if cfg.jobs == 1:
        pool = GlobalQueryPool(cfg.global_budget) \
            if cfg.global_budget is not None else None
        outcomes = [attack(task, make_victim(cfg.victim), vocabulary,
                           provider, pool) for task in tasks]
    else:
        def run_one(task):
            return attack(task, make_victim(cfg.victim), vocabulary, provider)

        with ThreadPoolExecutor(max_workers=cfg.jobs) as executor:
            outcomes = list(executor.map(run_one, tasks))
    return sorted(outcomes, key=lambda o: o.sample_id)


def _mean(values: list) -> float | None:
    return sum(values) / len(values) if values else None


def summarize_outcomes(outcomes: list, units_by_id: dict) -> dict:
    attempted = [o for o in outcomes if not o.skipped]
    summary = {
        "samples_total": len(outcomes),
        "samples_attempted": len(attempted),
        "samples_skipped": len(outcomes) - len(attempted),
        "successes": sum(1 for o in attempted if o.success),
        "budget_exhausted": sum(1 for o in outcomes if o.budget_exhausted),
    }
    try:
        summary["asr_percent"] = asr(outcomes)
    except NoAttempts:
        summary["asr_percent"] = None
    try:
        summary["delta_drop_mean"] = delta_drop(outcomes)
    except NoAttempts:
        summary["delta_drop_mean"] = None
    mean_queries = _mean([o.queries_used for o in attempted])
    summary["mean_queries"] = mean_queries
    if summary["asr_percent"] is not None and mean_queries:
        summary["apq"] = apq(summary["asr_percent"], mean_queries)
    else:
        summary["apq"] = None
    try:
        summary["fnr_percent"] = fnr(outcomes)
    except NoVulnerableSamples:
        summary["fnr_percent"] = None

    component_sums: dict = {}
    counted = 0
    for outcome in attempted:
        unit = units_by_id.get(outcome.sample_id)
        if unit is None:
            continue
        adversarial = parse_unit(outcome.adversarial_code,
                                 unit_id=outcome.sample_id)
        for key, value in codebleu(unit, adversarial).items():
            component_sums[key] = component_sums.get(key, 0.0) + value
        counted += 1
    summary["codebleu_mean"] = {
        key: value / counted for key, value in sorted(component_sums.items())
    } if counted else None

    vectors = []
    for outcome in attempted:
        unit = units_by_id.get(outcome.sample_id)
        if unit is None:
            continue
        vectors.append([outcome.substitution.get(name, name)
                        for name in unit.identifiers])
    try:
        summary["cad"] = cad(vectors)
    except PopulationTooSmall:
        summary["cad"] = None
    try:
        summary["cad_chars_raw"] = cad_raw_chars(
            [o.adversarial_code for o in attempted])
    except PopulationTooSmall:
        summary["cad_chars_raw"] = None
    return summary


def build_report(cfg: RunConfig, rows: list, ingest_errors: list,
                 outcomes: list, wall_clock: float | None) -> dict:
    units_by_id = {row["id"]: row["unit"] for row in rows}
    return {
        "tool": "hogforge",
        "version": __version__,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "wall_clock_seconds": wall_clock,
        "ingest_errors": ingest_errors,
        "outcomes": [outcome_to_dict(o) for o in outcomes],
        "metrics": summarize_outcomes(outcomes, units_by_id),
    }


def write_csv(outcomes: list, path: str) -> None:
    columns = ["sample_id", "status", "success", "skipped", "true_label",
               "final_label", "p_orig", "p_adv", "delta_drop",
               "queries_used", "budget_exhausted", "substitution",
               "transforms"]
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(columns)
        for outcome in outcomes:
            row = outcome_to_dict(outcome)
            writer.writerow([
                row["sample_id"], row["status"], row["success"],
                row["skipped"], row["true_label"], row["final_label"],
                row["p_orig"], row["p_adv"], row["delta_drop"],
                row["queries_used"], row["budget_exhausted"],
                json.dumps(row["substitution"], sort_keys=True),
                json.dumps(row["transforms"]),
            ])


def attack_cmd(args) -> int:
    cfg = load_config(args)
    rows, ingest_errors = ingest(args.corpus)
    vocabulary, provider = resolve_lexicon(cfg, [r["unit"] for r in rows])
    started = time.monotonic()
    outcomes = execute_attack(cfg, rows, vocabulary, provider)
    elapsed = time.monotonic() - started if cfg.timings else None
    report = build_report(cfg, rows, ingest_errors, outcomes, elapsed)
    emit_report(report, args.out)
    if args.csv:
        write_csv(outcomes, args.csv)
    return 0


# -- transform command ----------------------------------------------------

def transform_cmd(args) -> int:
    with open(args.input, "r", encoding="utf-8") as f:
        source = f.read()
    unit = parse_unit(source, unit_id=os.path.basename(args.input))
    if args.op not in OP_TO_KIND:
        raise ConfigError(
            f"unknown op {args.op!r}; valid: {', '.join(sorted(OP_TO_KIND))}")
    if args.site == "auto":
        sites = applicable_sites(unit, OP_TO_KIND[args.op])
        if not sites:
            print(f"inapplicable: no {OP_TO_KIND[args.op]} site "
                  f"accepts {args.op}")
            return 0
        site = sites[0]
    else:
        try:
            site = int(args.site)
        except ValueError:
            raise ConfigError(f"--site must be an integer node id or 'auto', "
                              f"got {args.site!r}")
    try:
        transformed = apply_transform(unit, TransformOp(op=args.op, site=site))
    except InapplicableTransform as exc:
        print(f"inapplicable: {exc.reason}")
        return 0
    sys.stdout.write(transformed.text)
    return 0


# -- metrics command ------------------------------------------------------

def _load_units_arg(path: str) -> dict:
    if path.endswith(".jsonl"):
        rows, errors = ingest(path)
        if errors:
            details = "; ".join(f"line {e['line']}: {e['error']}"
                                for e in errors)
            raise ConfigError(f"{path} has invalid lines: {details}")
        return {row["id"]: row["unit"] for row in rows}
    with open(path, "r", encoding="utf-8") as f:
        source = f.read()
    name = os.path.basename(path)
    return {name: parse_unit(source, unit_id=name)}


def metrics_cmd(args) -> int:
    originals = _load_units_arg(args.orig)
    adversarials = _load_units_arg(args.adv)
    if len(originals) == 1 and len(adversarials) == 1:
        pair_ids = [(next(iter(originals)), next(iter(adversarials)))]
    else:
        shared = sorted(set(originals) & set(adversarials))
        pair_ids = [(i, i) for i in shared]
    pairs = []
    for orig_id, adv_id in pair_ids:
        scores = codebleu(originals[orig_id], adversarials[adv_id])
        pairs.append({"id": adv_id, **scores})
    means = {}
    if pairs:
        for key in ("codebleu", "bleu", "bleu_weighted", "match_ast",
                    "match_dataflow"):
            means[key] = _mean([p[key] for p in pairs])
    try:
        chars_raw = cad_raw_chars(
            [adversarials[adv_id].text for _, adv_id in pair_ids])
    except PopulationTooSmall:
        chars_raw = None
    payload = {
        "pairs": pairs,
        "means": means or None,
        "cad_chars_raw": chars_raw,
        "unmatched_orig": sorted(
            set(originals) - {o for o, _ in pair_ids}),
        "unmatched_adv": sorted(
            set(adversarials) - {a for _, a in pair_ids}),
    }
    emit_report(payload, args.out)
    return 0


# -- compare-search command -----------------------------------------------

def _resolve_instance(args) -> tuple:
    """One (unit, label) from either a source file or a corpus row."""
    if args.input and args.corpus:
        raise ConfigError("give either --input or --corpus, not both")
    if args.input:
        with open(args.input, "r", encoding="utf-8") as f:
            source = f.read()
        unit = parse_unit(source, unit_id=os.path.basename(args.input))
        return unit, args.label
    if not args.corpus:
        raise ConfigError("one of --input or --corpus is required")
    rows, _ = ingest(args.corpus)
    if not rows:
        raise ConfigError(f"no usable samples in {args.corpus}")
    if args.sample:
        for row in rows:
            if row["id"] == args.sample:
                return row["unit"], row["label"]
        raise ConfigError(f"sample {args.sample!r} not in corpus")
    if len(rows) > 1:
        raise ConfigError("corpus has several samples; pick one with --sample")
    return rows[0]["unit"], rows[0]["label"]


def compare_search_cmd(args) -> int:
    cfg = load_config(args)
    unit, label = _resolve_instance(args)
    vocabulary, provider = resolve_lexicon(cfg, [unit])
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    unknown = [s for s in strategies if s not in ALL_STRATEGIES]
    if unknown:
        raise ConfigError(f"unknown strategies {unknown}; "
                          f"valid: {', '.join(ALL_STRATEGIES)}")
    trajectory_rows = []
    per_strategy: dict = {}
    for strategy in strategies:
        runs = []
        for index in range(args.runs):
            run_seed = cfg.seed + index
            handle = make_victim(cfg.victim)
            gate = QueryGate(handle, cfg.budget)
            p_orig = gate.predict(unit.text).p_vulnerable
            pool = build_pool(unit, vocabulary, provider, cfg.top_k)
            rng = rng_stream(run_seed, _STRATEGY_STREAM[strategy],
                             unit.unit_id or "instance")
            result = run_strategy(strategy, unit, pool, gate, label, p_orig,
                                  cfg, rng, stop_on_flip=cfg.stop_on_flip)
            for row in result.trajectory:
                trajectory_rows.append({
                    "strategy": strategy,
                    "seed": run_seed,
                    "iteration": row["iteration"],
                    "best_position": row["best_position"],
                    "best_fitness": row["best_fitness"],
                })
            try:
                diversity = cad(result.final_name_vectors)
            except PopulationTooSmall:
                diversity = None
            runs.append({
                "seed": run_seed,
                "status": result.status,
                "best_fitness": result.best_fitness,
                "queries_used": result.queries_used,
                "flipped": result.flipped,
                "flip_queries": result.flip_queries,
                "diversity": diversity,
            })
        diversities = [r["diversity"] for r in runs
                       if r["diversity"] is not None]
        per_strategy[strategy] = {
            "runs": runs,
            "diversity_mean": _mean(diversities),
        }
    if args.dump_trajectories:
        with open(args.dump_trajectories, "w", encoding="utf-8") as f:
            for row in trajectory_rows:
                f.write(json.dumps(_plain(row), sort_keys=True) + "\n")
    payload = {
        "tool": "hogforge",
        "version": __version__,
        "sample": unit.unit_id,
        "victim": cfg.victim,
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "strategies": per_strategy,
    }
    emit_report(payload, args.out)
    return 0


# -- sweep-lambda command -------------------------------------------------

def sweep_lambda_cmd(args) -> int:
    cfg = load_config(args)
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--values must be comma-separated numbers, "
                              f"got {args.values!r}")
    else:
        values = list(LAMBDA_GRID)
    if not values:
        raise ConfigError("--values must name at least one weight")
    rows, ingest_errors = ingest(args.corpus)
    vocabulary, provider = resolve_lexicon(cfg, [r["unit"] for r in rows])
    table = []
    reports = {}
    for value in values:
        run_cfg = cfg.with_overrides(control_flow_weight=value)
        started = time.monotonic()
        outcomes = execute_attack(run_cfg, rows, vocabulary, provider)
        elapsed = time.monotonic() - started if run_cfg.timings else None
        report = build_report(run_cfg, rows, ingest_errors, outcomes, elapsed)
        reports[str(value)] = report
        table.append({"lambda": value,
                      "asr_percent": report["metrics"]["asr_percent"]})
    payload = {
        "tool": "hogforge",
        "version": __version__,
        "seed": cfg.seed,
        "table": table,
        "runs": reports,
    }
    emit_report(payload, args.out)
    return 0


# -- rank command ---------------------------------------------------------

def rank_cmd(args) -> int:
    cfg = load_config(args)
    unit, _ = _resolve_instance(args)
    if args.identifier not in unit.identifiers:
        raise ConfigError(
            f"identifier {args.identifier!r} not in unit; "
            f"has: {', '.join(unit.identifiers)}")
    vocabulary, provider = resolve_lexicon(cfg, [unit])
    pool = build_pool(unit, vocabulary, provider, cfg.top_k)
    limit = args.top if args.top is not None else cfg.top_k
    for word, distance in pool.candidates(args.identifier)[:limit]:
        print(f"{word}\t{distance:.6f}")
    return 0


# -- argument parsing -----------------------------------------------------

def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int,
                        help=f"run seed (falls back to ${SEED_ENV_VAR})")
    parser.add_argument("--victim", help="victim spec, e.g. planted or "
                        "http://host:port/predict")
    parser.add_argument("--budget", type=int,
                        help="victim queries allowed per sample")
    parser.add_argument("--lambda", dest="lambda_", type=float,
                        help="control-flow weight for structure sampling")
    parser.add_argument("--vocab", help="identifier vocabulary file")
    parser.add_argument("--embeddings", help="identifier vector file")
    parser.add_argument("--jobs", type=int, help="parallel sample workers")
    parser.add_argument("--global-budget", dest="global_budget", type=int,
                        help="query allowance shared by all samples "
                        "(requires --jobs 1)")
    parser.add_argument("--timings", action="store_true",
                        help="record wall-clock in the report")


def _add_instance_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="single source file")
    parser.add_argument("--corpus", help="corpus JSONL")
    parser.add_argument("--sample", help="sample id within --corpus")
    parser.add_argument("--label", type=int, default=1, choices=(0, 1),
                        help="true label when using --input (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hogforge",
        description="Dual-channel black-box adversarial rewriting of "
                    "C-like code against vulnerability classifiers.")
    parser.add_argument("--version", action="version",
                        version=f"hogforge {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    cmd = commands.add_parser("attack", help="run the dual-channel attack "
                              "over a corpus")
    _add_config_flags(cmd)
    cmd.add_argument("--corpus", required=True, help="corpus JSONL")
    cmd.add_argument("--out", help="report JSON path (default stdout)")
    cmd.add_argument("--csv", help="also flatten per-sample rows to CSV")
    cmd.set_defaults(func=attack_cmd)

    cmd = commands.add_parser("transform", help="apply one structure "
                              "transform to a source file")
    cmd.add_argument("--op", required=True,
                     help=f"one of: {', '.join(sorted(OP_TO_KIND))}")
    cmd.add_argument("--site", default="auto",
                     help="node id, or 'auto' for the first applicable site")
    cmd.add_argument("--input", required=True, help="source file")
    cmd.set_defaults(func=transform_cmd)

    cmd = commands.add_parser("metrics", help="score adversarial code "
                              "against originals")
    cmd.add_argument("--orig", required=True, help="file or corpus JSONL")
    cmd.add_argument("--adv", required=True, help="file or corpus JSONL")
    cmd.add_argument("--out", help="output JSON path (default stdout)")
    cmd.set_defaults(func=metrics_cmd)

    cmd = commands.add_parser("compare-search", help="run several lexical "
                              "search strategies on one instance")
    _add_config_flags(cmd)
    _add_instance_flags(cmd)
    cmd.add_argument("--strategies", default=",".join(ALL_STRATEGIES),
                     help="comma list (default: all)")
    cmd.add_argument("--runs", type=int, default=1,
                     help="seeds per strategy, seed..seed+runs-1")
    cmd.add_argument("--dump-trajectories", dest="dump_trajectories",
                     help="write per-iteration best positions as JSONL")
    cmd.add_argument("--out", help="summary JSON path (default stdout)")
    cmd.set_defaults(func=compare_search_cmd)

    cmd = commands.add_parser("sweep-lambda", help="re-run the attack "
                              "across control-flow weights")
    _add_config_flags(cmd)
    cmd.add_argument("--corpus", required=True, help="corpus JSONL")
    cmd.add_argument("--values", help="comma list of weights "
                     "(default: the documented grid)")
    cmd.add_argument("--out", help="output JSON path (default stdout)")
    cmd.set_defaults(func=sweep_lambda_cmd)

    cmd = commands.add_parser("rank", help="inspect the candidate pool "
                              "for one identifier")
    _add_config_flags(cmd)
    _add_instance_flags(cmd)
    cmd.add_argument("--identifier", required=True)
    cmd.add_argument("--top", type=int, help="rows to print "
                     "(default: the configured k)")
    cmd.set_defaults(func=rank_cmd)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MiniCSyntaxError as exc:
        print(f"error: syntax: {exc}", file=sys.stderr)
        return 2
    except HogforgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
