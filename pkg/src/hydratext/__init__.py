"""Multi-objective word-substitution attacks against black-box text classifiers.

The engine searches for an adversarial example that fools the victim model
while replacing as few words as possible and staying semantically close to
the original input.  Victim models plug in behind the VictimOracle interface
(score or decision mode), similarity behind SimilarityProvider.
"""

from .engine import (
    AttackResult,
    EngineConfig,
    ExhaustiveReference,
    QueryArchive,
    TerminationReason,
    VisitedNeighborhood,
    exhaustive_reference,
    lexicon_f1_function,
    probe_monotonicity,
    probe_submodularity,
    run_attack,
)
from .errors import (
    DatasetFormat,
    DimensionMismatch,
    EmptyPopulation,
    GroundSetTooLarge,
    HydratextError,
    InfeasibleSolution,
    InvalidLabel,
    MissingProbabilities,
    OracleTransport,
    OriginalMisclassified,
    ProtocolViolation,
    SearchSpaceTooLarge,
)
from .harness import (
    Aggregates,
    CampaignConfig,
    CampaignReport,
    InstanceRecord,
    Outcome,
    aggregate_metrics,
    assign_target_label,
    exceeds_modification_cap,
    load_campaign_config,
    load_dataset,
    run_campaign,
)
from .objectives import (
    AttackGoal,
    F1Value,
    Mode,
    ObjectiveVector,
    Prediction,
    SimilarityProvider,
    VictimOracle,
    eval_f1,
    eval_objectives,
)
from .oracles import LexiconClassifier, RemoteOracle
from .pareto import Population, ScoredSolution, dominates, weakly_dominates
from .similarity import (
    EmbeddingSimilarity,
    EmbeddingTable,
    TokenOverlapSimilarity,
    cosine_similarity,
    embed,
)
from .space import (
    AttackInstance,
    CandidateSets,
    Solution,
    TokenSequence,
    Variation,
    VariationKind,
    apply_solution,
    enumerate_neighbors,
    load_instance,
    modification_rate,
    neighborhood_size,
    parse_instance,
    sample_variation,
)

__version__ = "0.1.0"
