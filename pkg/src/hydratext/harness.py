"""Batch attack campaigns over a JSONL dataset.

The harness filters instances by length, attacks the rest, reclassifies
engine successes that replaced too many words as failures, and aggregates
the usual campaign metrics: success rate, mean modification rate, mean
similarity (both over successful attacks only), and mean query count (over
every attacked instance).
"""

from __future__ import annotations

import csv
import io
import json
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

from .engine import AttackResult, EngineConfig, run_attack
from .errors import DatasetFormat, InvalidLabel, OracleTransport, OriginalMisclassified
from .objectives import AttackGoal, Mode, SimilarityProvider, VictimOracle
from .oracles import LexiconClassifier, RemoteOracle
from .similarity import EmbeddingSimilarity, EmbeddingTable, TokenOverlapSimilarity
from .space import AttackInstance, modification_rate, parse_instance

DEFAULT_MIN_LENGTH = 10
DEFAULT_MAX_LENGTH = 100
DEFAULT_MODIFICATION_CAP = 0.25

# three-way entailment labeling used by the targeted assignment rule
ENTAILMENT, CONTRADICTION, NEUTRAL = 0, 1, 2


class Outcome(Enum):
    SUCCESS = "success"
    ENGINE_FAILURE = "engine_failure"
    MODIFICATION_CAP = "modification_cap"
    ORIGINAL_MISCLASSIFIED = "original_misclassified"
    SKIPPED = "skipped"


ATTACKED_OUTCOMES = (Outcome.SUCCESS, Outcome.ENGINE_FAILURE, Outcome.MODIFICATION_CAP)


@dataclass(frozen=True)
class OracleSpec:
    """Which victim to attack: a lexicon file or a remote model server."""

    kind: str  # "lexicon" | "remote"
    path: str | None = None
    host: str | None = None
    port: int | None = None
    timeout: float = 10.0


@dataclass(frozen=True)
class SimilaritySpec:
    kind: str  # "embedding" | "overlap"
    path: str | None = None


@dataclass(frozen=True)
class CampaignConfig:
    dataset: Path
    oracle: OracleSpec
    similarity: SimilaritySpec = SimilaritySpec(kind="overlap")
    mode: Mode = Mode.SCORE
    targeted: bool = False
    max_generations: int = 2000
    max_queries: int = 6000
    seed: int = 0
    min_length: int = DEFAULT_MIN_LENGTH
    max_length: int = DEFAULT_MAX_LENGTH
    modification_cap: float = DEFAULT_MODIFICATION_CAP
    parallelism: int = 1
    records_csv: Path | None = None
    aggregates_json: Path | None = None


def load_campaign_config(path: str | Path, seed_override: int | None = None) -> CampaignConfig:
    """Parse a campaign config JSON file; unknown keys are rejected."""
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetFormat(f"{path}: {exc}") from None
    if not isinstance(obj, dict):
        raise DatasetFormat(f"{path}: expected a JSON object")
    known = {
        "dataset", "oracle", "similarity", "mode", "targeted", "engine",
        "length_bounds", "modification_cap", "parallelism", "output",
    }
    unknown = set(obj) - known
    if unknown:
        raise DatasetFormat(f"{path}: unknown config keys {sorted(unknown)}")
    try:
        oracle_obj = dict(obj["oracle"])
        sim_obj = dict(obj.get("similarity", {"kind": "overlap"}))
        engine = dict(obj.get("engine", {}))
        bounds = obj.get("length_bounds", [DEFAULT_MIN_LENGTH, DEFAULT_MAX_LENGTH])
        output = dict(obj.get("output", {}))
        seed = int(engine.get("seed", 0))
        if seed_override is not None:
            seed = seed_override
        base = path.parent

        def resolve(p: str | None) -> Path | None:
            return None if p is None else (base / p if not Path(p).is_absolute() else Path(p))

        oracle_path = oracle_obj.get("path")
        return CampaignConfig(
            dataset=resolve(obj["dataset"]),
            oracle=OracleSpec(
                kind=oracle_obj["kind"],
                path=str(resolve(oracle_path)) if oracle_path else None,
                host=oracle_obj.get("host"),
                port=oracle_obj.get("port"),
                timeout=float(oracle_obj.get("timeout", 10.0)),
            ),
            similarity=SimilaritySpec(
                kind=sim_obj["kind"],
                path=str(resolve(sim_obj.get("path"))) if sim_obj.get("path") else None,
            ),
            mode=Mode(obj.get("mode", "score")),
            targeted=bool(obj.get("targeted", False)),
            max_generations=int(engine.get("max_generations", 2000)),
            max_queries=int(engine.get("max_queries", 6000)),
            seed=seed,
            min_length=int(bounds[0]),
            max_length=int(bounds[1]),
            modification_cap=float(obj.get("modification_cap", DEFAULT_MODIFICATION_CAP)),
            parallelism=int(obj.get("parallelism", 1)),
            records_csv=resolve(output.get("records_csv")),
            aggregates_json=resolve(output.get("aggregates_json")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetFormat(f"{path}: bad campaign config: {exc}") from None


@dataclass(frozen=True)
class InstanceRecord:
    index: int
    n_tokens: int
    outcome: Outcome
    reason: str  # skip reason or engine termination reason
    cardinality: int | None = None
    modification_rate: float | None = None
    similarity: float | None = None
    queries: int | None = None
    generations: int | None = None


@dataclass(frozen=True)
class Aggregates:
    attacked: int
    successful: int
    success_rate: float | None  # fraction; None when nothing was attacked
    mean_modification_rate: float | None  # over successful attacks
    mean_similarity: float | None  # over successful attacks
    mean_queries: float | None  # over all attacked instances
    outcome_counts: dict[str, int] = field(default_factory=dict)


@dataclass
class CampaignReport:
    records: list[InstanceRecord]
    aggregates: Aggregates
    aborted: bool = False
    abort_error: str | None = None


def load_dataset(path: str | Path) -> list[AttackInstance]:
    """Read a JSONL dataset, one attack instance per line."""
    path = Path(path)
    instances: list[AttackInstance] = []
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DatasetFormat(f"{path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetFormat(f"{path}:{lineno}: {exc}") from None
        instances.append(parse_instance(obj, where=f"{path}:{lineno}"))
    return instances


def assign_target_label(label: int, num_classes: int, rng: random.Random) -> int:
    """Pick the wrong class a targeted attack must reach.

    For three classes the entailment convention applies (entailment=0,
    contradiction=1, neutral=2): contradiction maps to entailment, entailment
    to contradiction, and neutral flips a fair coin between the two.  Other
    class counts get a uniform wrong label.
    """
    if num_classes < 2:
        raise ValueError("need at least two classes")
    if not 0 <= label < num_classes:
        raise InvalidLabel(f"label {label} outside [0, {num_classes})")
    if num_classes == 3:
        if label == CONTRADICTION:
            return ENTAILMENT
        if label == ENTAILMENT:
            return CONTRADICTION
        return ENTAILMENT if rng.random() <= 0.5 else CONTRADICTION
    others = [c for c in range(num_classes) if c != label]
    if len(others) == 1:
        return others[0]
    return rng.choice(others)


def exceeds_modification_cap(rate: float, cap: float = DEFAULT_MODIFICATION_CAP) -> bool:
    """An attack fails the cap only when strictly above it; exactly at the
    cap still counts as a success."""
    return rate > cap


def aggregate_metrics(records: Sequence[InstanceRecord]) -> Aggregates:
    attacked = [r for r in records if r.outcome in ATTACKED_OUTCOMES]
    successes = [r for r in attacked if r.outcome is Outcome.SUCCESS]
    counts = {outcome.value: 0 for outcome in Outcome}
    for r in records:
        counts[r.outcome.value] += 1

    def mean(values: list[float]) -> float | None:
        return sum(values) / len(values) if values else None

    return Aggregates(
        attacked=len(attacked),
        successful=len(successes),
        success_rate=len(successes) / len(attacked) if attacked else None,
        mean_modification_rate=mean([r.modification_rate for r in successes]),
        mean_similarity=mean([r.similarity for r in successes]),
        mean_queries=mean([float(r.queries) for r in attacked]),
        outcome_counts=counts,
    )


def build_similarity(spec: SimilaritySpec) -> SimilarityProvider:
    if spec.kind == "embedding":
        if not spec.path:
            raise DatasetFormat("embedding similarity needs a 'path'")
        return EmbeddingSimilarity(EmbeddingTable.from_file(spec.path))
    if spec.kind == "overlap":
        return TokenOverlapSimilarity()
    raise DatasetFormat(f"unknown similarity kind {spec.kind!r}")


def build_oracle_factory(spec: OracleSpec, mode: Mode) -> Callable[[], VictimOracle]:
    """A factory yielding one oracle per worker.

    The lexicon classifier is stateless, so one shared instance serves all
    workers; remote oracles get a fresh session each.
    """
    if spec.kind == "lexicon":
        if not spec.path:
            raise DatasetFormat("lexicon oracle needs a 'path'")
        shared = LexiconClassifier.from_file(spec.path, mode=mode)
        return lambda: shared
    if spec.kind == "remote":
        if not spec.host or spec.port is None:
            raise DatasetFormat("remote oracle needs 'host' and 'port'")
        return lambda: RemoteOracle(spec.host, spec.port, timeout=spec.timeout, mode=mode)
    raise DatasetFormat(f"unknown oracle kind {spec.kind!r}")


def _attack_instance(
    index: int,
    instance: AttackInstance,
    cfg: CampaignConfig,
    oracle: VictimOracle,
    sim: SimilarityProvider,
) -> InstanceRecord:
    n = len(instance.x)
    if n < cfg.min_length:
        return InstanceRecord(index=index, n_tokens=n, outcome=Outcome.SKIPPED, reason="too_short")
    if n > cfg.max_length:
        return InstanceRecord(index=index, n_tokens=n, outcome=Outcome.SKIPPED, reason="too_long")

    seed = cfg.seed ^ index  # per-instance seed keeps parallel runs reproducible
    if cfg.targeted:
        target = assign_target_label(instance.label, oracle.num_classes, random.Random(seed))
        goal = AttackGoal(instance.label, target)
    else:
        goal = AttackGoal(instance.label)
    engine_cfg = EngineConfig(
        max_generations=cfg.max_generations,
        max_queries=cfg.max_queries,
        rng_seed=seed,
        mode=cfg.mode,
        targeted=cfg.targeted,
    )
    try:
        result = run_attack(instance.x, instance.candidates, goal, oracle, sim, engine_cfg)
    except OriginalMisclassified:
        return InstanceRecord(
            index=index, n_tokens=n, outcome=Outcome.ORIGINAL_MISCLASSIFIED, reason="misclassified"
        )
    return _classify_result(index, n, result, cfg.modification_cap)


def _classify_result(
    index: int, n: int, result: AttackResult, cap: float
) -> InstanceRecord:
    rate = modification_rate(result.solution, n)
    if result.success and exceeds_modification_cap(rate, cap):
        outcome = Outcome.MODIFICATION_CAP
    elif result.success:
        outcome = Outcome.SUCCESS
    else:
        outcome = Outcome.ENGINE_FAILURE
    return InstanceRecord(
        index=index,
        n_tokens=n,
        outcome=outcome,
        reason=result.termination_reason.value,
        cardinality=len(result.solution),
        modification_rate=rate,
        similarity=result.objectives.f3,
        queries=result.oracle_queries,
        generations=result.generations,
    )


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    """Attack every usable instance of the dataset and aggregate the results.

    An oracle transport failure aborts the campaign; whatever records exist
    are still flushed to the configured outputs.
    """
    try:
        instances = load_dataset(cfg.dataset)
    except DatasetFormat as exc:
        report = CampaignReport(
            records=[], aggregates=aggregate_metrics([]), aborted=True, abort_error=str(exc)
        )
        write_report(report, cfg)
        raise

    sim = build_similarity(cfg.similarity)
    factory = build_oracle_factory(cfg.oracle, cfg.mode)
    local = threading.local()

    def worker_oracle() -> VictimOracle:
        oracle = getattr(local, "oracle", None)
        if oracle is None:
            oracle = factory()
            local.oracle = oracle
        return oracle

    def attack_one(item: tuple[int, AttackInstance]) -> InstanceRecord:
        index, instance = item
        return _attack_instance(index, instance, cfg, worker_oracle(), sim)

    records: list[InstanceRecord] = []
    aborted = False
    abort_error: str | None = None
    items = list(enumerate(instances))
    try:
        if cfg.parallelism <= 1:
            for item in items:
                records.append(attack_one(item))
        else:
            with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
                records.extend(pool.map(attack_one, items))
    except OracleTransport as exc:
        aborted = True
        abort_error = str(exc)

    records.sort(key=lambda r: r.index)
    report = CampaignReport(
        records=records,
        aggregates=aggregate_metrics(records),
        aborted=aborted,
        abort_error=abort_error,
    )
    write_report(report, cfg)
    return report


_CSV_COLUMNS = (
    "instance",
    "n_tokens",
    "outcome",
    "reason",
    "cardinality",
    "modification_rate",
    "similarity",
    "queries",
    "generations",
)


def records_csv(records: Sequence[InstanceRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for r in records:
        writer.writerow(
            [
                r.index,
                r.n_tokens,
                r.outcome.value,
                r.reason,
                "" if r.cardinality is None else r.cardinality,
                "" if r.modification_rate is None else repr(r.modification_rate),
                "" if r.similarity is None else repr(r.similarity),
                "" if r.queries is None else r.queries,
                "" if r.generations is None else r.generations,
            ]
        )
    return out.getvalue()


def aggregates_json(report: CampaignReport) -> str:
    agg = report.aggregates
    payload = {
        "attacked": agg.attacked,
        "successful": agg.successful,
        "success_rate": agg.success_rate,
        "mean_modification_rate": agg.mean_modification_rate,
        "mean_similarity": agg.mean_similarity,
        "mean_queries": agg.mean_queries,
        "outcome_counts": agg.outcome_counts,
        "aborted": report.aborted,
        "abort_error": report.abort_error,
        "conventions": {
            "modification_and_similarity_means": "successful attacks only",
            "query_mean": "all attacked instances, including failed attacks",
            "modification_cap": "engine successes strictly above the cap count as failures",
            "success_rate": "fraction of attacked instances",
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def write_report(report: CampaignReport, cfg: CampaignConfig) -> None:
    if cfg.records_csv is not None:
        cfg.records_csv.parent.mkdir(parents=True, exist_ok=True)
        cfg.records_csv.write_text(records_csv(report.records), encoding="utf-8")
    if cfg.aggregates_json is not None:
        cfg.aggregates_json.parent.mkdir(parents=True, exist_ok=True)
        cfg.aggregates_json.write_text(aggregates_json(report), encoding="utf-8")


def human_summary(report: CampaignReport) -> str:
    """Two-decimal campaign summary for terminal output."""
    agg = report.aggregates

    def pct(value: float | None) -> str:
        return "n/a" if value is None else f"{100.0 * value:.2f}"

    def num(value: float | None) -> str:
        return "n/a" if value is None else f"{value:.2f}"

    lines = [
        f"attacked {agg.attacked} instance(s), {agg.successful} successful",
        f"  Suc. (%):  {pct(agg.success_rate)}",
        f"  Mod. (%):  {pct(agg.mean_modification_rate)}",
        f"  Sim.:      {num(agg.mean_similarity)}",
        f"  #Que.:     {num(agg.mean_queries)}",
    ]
    skipped = report.aggregates.outcome_counts.get(Outcome.SKIPPED.value, 0)
    misclassified = report.aggregates.outcome_counts.get(Outcome.ORIGINAL_MISCLASSIFIED.value, 0)
    lines.append(f"  skipped {skipped}, misclassified {misclassified}")
    if report.aborted:
        lines.append(f"campaign ABORTED: {report.abort_error}")
    return "\n".join(lines)
