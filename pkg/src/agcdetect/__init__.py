"""Two-area AGC simulation, attack injection, and data-driven detection.

The package covers the full experiment loop: simulate the nonlinear
two-area load-frequency control system under load disturbances and
false-data-injection attacks, turn labeled runs into a dataset, extract a
statistical feature catalog, select discriminative features with FDR
control, and train/evaluate a set of multiclass detectors.
"""

from .simulation import (
    AgcParameters,
    SimulationConfig,
    SystemState,
    Trajectory,
    NonFiniteStateError,
    deadband,
    rate_limit,
    step_dynamics,
    simulate,
    simulate_with_states,
)
from .attacks import (
    Channel,
    AttackKind,
    AttackSpec,
    Scenario,
    attack_offset,
    attack_coefficients,
    apply_to_channels,
    LABEL_NAMES,
)
from .dataset import (
    Dataset,
    DatasetConfig,
    ScenarioRanges,
    generate_dataset,
    sample_scenario,
    split,
)
from .features import (
    FEATURE_NAMES,
    PER_CHANNEL_FEATURE_NAMES,
    FeatureMatrix,
    FeatureVector,
    extract_channel,
    extract_matrix,
    extract_sample,
)
from .selection import (
    SelectionMask,
    apply_mask,
    benjamini_hochberg,
    feature_p_value,
    fit_mask,
)
from .evaluation import (
    ConfusionMatrix,
    EvaluationReport,
    confusion,
    metrics,
    report_render,
)
from .ml import (
    CLASSIFIER_TAGS,
    load_model,
    predict,
    predict_scores,
    save_model,
    train_classifier,
)
from .pipeline import PipelineConfig, RunManifest, load_config_file, run_bench

__version__ = "0.1.0"
