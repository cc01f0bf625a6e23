"""Command-line interface.

    hydratext attack --config campaign.json     # batch campaign
    hydratext attack one --instance inst.json   # single instance, JSON result
    hydratext enumerate --instance inst.json    # exhaustive ground truth
    hydratext probe --function probe.json       # monotonicity/submodularity

HYDRA_SEED, when set, overrides the configured seed.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click

from .engine import EngineConfig, exhaustive_reference, run_attack
from .engine import lexicon_f1_function, probe_monotonicity, probe_submodularity
from .errors import HydratextError
from .harness import (
    build_similarity,
    human_summary,
    load_campaign_config,
    run_campaign,
    SimilaritySpec,
)
from .objectives import AttackGoal, Mode
from .oracles import LexiconClassifier, RemoteOracle
from .space import load_instance


def _seed_override() -> int | None:
    raw = os.environ.get("HYDRA_SEED")
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise click.UsageError(f"HYDRA_SEED must be an integer, got {raw!r}")


def _build_oracle(lexicon: Path | None, remote: str | None, mode: Mode):
    if (lexicon is None) == (remote is None):
        raise click.UsageError("exactly one of --lexicon or --remote is required")
    if lexicon is not None:
        return LexiconClassifier.from_file(lexicon, mode=mode)
    host, _, port = remote.partition(":")
    if not host or not port.isdigit():
        raise click.UsageError("--remote expects HOST:PORT")
    return RemoteOracle(host, int(port), mode=mode)


def _build_similarity(embeddings: Path | None):
    if embeddings is None:
        return build_similarity(SimilaritySpec(kind="overlap"))
    return build_similarity(SimilaritySpec(kind="embedding", path=str(embeddings)))


@click.group()
def main() -> None:
    """Word-substitution attack engine and campaign harness."""


@main.group(invoke_without_command=True)
@click.option("--config", "config_path", type=click.Path(exists=True, path_type=Path),
              help="Campaign config JSON.")
@click.pass_context
def attack(ctx: click.Context, config_path: Path | None) -> None:
    """Run a campaign (default) or a single instance (see 'attack one')."""
    if ctx.invoked_subcommand is not None:
        return
    if config_path is None:
        raise click.UsageError("provide --config for a campaign, or use 'attack one'")
    try:
        cfg = load_campaign_config(config_path, seed_override=_seed_override())
        report = run_campaign(cfg)
    except HydratextError as exc:
        raise click.ClickException(str(exc))
    click.echo(human_summary(report))
    if report.aborted:
        sys.exit(1)


_common_oracle_options = [
    click.option("--lexicon", type=click.Path(exists=True, path_type=Path),
                 help="Lexicon oracle JSON file."),
    click.option("--remote", help="Remote oracle as HOST:PORT."),
    click.option("--embeddings", type=click.Path(exists=True, path_type=Path),
                 help="Embedding table (word2vec text); token overlap otherwise."),
    click.option("--mode", type=click.Choice([m.value for m in Mode]), default="score"),
]


def _with_oracle_options(fn):
    for option in reversed(_common_oracle_options):
        fn = option(fn)
    return fn


@attack.command("one")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--target-label", type=int, default=None,
              help="Targeted attack toward this label; untargeted otherwise.")
@click.option("--max-generations", type=int, default=2000, show_default=True)
@click.option("--max-queries", type=int, default=6000, show_default=True)
@click.option("--trajectory", "trajectory_path", type=click.Path(path_type=Path),
              help="Also write the per-generation trajectory CSV here.")
@_with_oracle_options
def attack_one(
    instance_path: Path,
    seed: int,
    target_label: int | None,
    max_generations: int,
    max_queries: int,
    trajectory_path: Path | None,
    lexicon: Path | None,
    remote: str | None,
    embeddings: Path | None,
    mode: str,
) -> None:
    """Attack one instance and print the result as JSON."""
    run_mode = Mode(mode)
    override = _seed_override()
    if override is not None:
        seed = override
    try:
        instance = load_instance(instance_path)
        oracle = _build_oracle(lexicon, remote, run_mode)
        sim = _build_similarity(embeddings)
        goal = AttackGoal(instance.label, target_label)
        config = EngineConfig(
            max_generations=max_generations,
            max_queries=max_queries,
            rng_seed=seed,
            mode=run_mode,
            targeted=target_label is not None,
            log_trajectory=trajectory_path is not None,
        )
        result = run_attack(instance.x, instance.candidates, goal, oracle, sim, config)
    except (HydratextError, ValueError) as exc:
        raise click.ClickException(str(exc))
    if trajectory_path is not None:
        trajectory_path.write_text(result.trajectory_csv(), encoding="utf-8")
    click.echo(result.to_json())


@main.command("enumerate")
@click.option("--instance", "instance_path", required=True,
              type=click.Path(exists=True, path_type=Path))
@click.option("--target-label", type=int, default=None)
@_with_oracle_options
def enumerate_cmd(
    instance_path: Path,
    target_label: int | None,
    lexicon: Path | None,
    remote: str | None,
    embeddings: Path | None,
    mode: str,
) -> None:
    """Exhaustively evaluate a small instance and print the exact front."""
    run_mode = Mode(mode)
    try:
        instance = load_instance(instance_path)
        oracle = _build_oracle(lexicon, remote, run_mode)
        sim = _build_similarity(embeddings)
        goal = AttackGoal(instance.label, target_label)
        reference = exhaustive_reference(instance.x, instance.candidates, goal, oracle, sim)
    except (HydratextError, ValueError) as exc:
        raise click.ClickException(str(exc))

    def entry_json(entry):
        return {
            "cardinality": len(entry.solution),
            "choices": [[pos, word] for pos, word in entry.solution.choices],
            "f1": entry.objectives.f1.json_value(),
            "f2": entry.objectives.f2,
            "f3": entry.objectives.f3,
            "success": entry.objectives.success,
        }

    click.echo(
        json.dumps(
            {
                "evaluated": reference.evaluated,
                "front": [entry_json(e) for e in reference.front],
                "minimal_success": (
                    None
                    if reference.minimal_success is None
                    else entry_json(reference.minimal_success)
                ),
            },
            sort_keys=True,
        )
    )


@main.command("probe")
@click.option("--function", "spec_path", required=True,
              type=click.Path(exists=True, path_type=Path),
              help="Probe spec JSON: modular weights or a lexicon f1 instance.")
def probe_cmd(spec_path: Path) -> None:
    """Check a set function for monotonicity and submodularity violations.

    Spec formats:
      {"kind": "modular", "weights": [w0, w1, ...]}
      {"kind": "lexicon_f1", "instance": "inst.json", "lexicon": "lex.json"}
    """
    try:
        spec = json.loads(spec_path.read_text(encoding="utf-8"))
        kind = spec.get("kind")
        if kind == "modular":
            weights = [float(w) for w in spec["weights"]]
            ground_size = len(weights)
            f = lambda subset: sum(weights[i] for i in subset)  # noqa: E731
            ground = list(range(ground_size))
        elif kind == "lexicon_f1":
            base = spec_path.parent
            instance = load_instance(base / spec["instance"])
            oracle = LexiconClassifier.from_file(base / spec["lexicon"])
            f, items = lexicon_f1_function(
                instance.x, instance.candidates, AttackGoal(instance.label), oracle
            )
            ground = [list(item) for item in items]
            ground_size = len(items)
        else:
            raise click.ClickException(f"unknown probe kind {kind!r}")
        mono = probe_monotonicity(f, ground_size)
        sub = probe_submodularity(f, ground_size)
    except (HydratextError, KeyError, ValueError, OSError) as exc:
        raise click.ClickException(str(exc))
    click.echo(
        json.dumps(
            {
                "ground": ground,
                "ground_size": ground_size,
                "monotone": not mono,
                "submodular": not sub,
                "monotonicity_violations": [
                    [sorted(x), sorted(y)] for x, y in mono
                ],
                "submodularity_violations": [
                    [sorted(s1), sorted(s2), e] for s1, s2, e in sub
                ],
            },
            sort_keys=True,
        )
    )


if __name__ == "__main__":
    main()
