"""Weight-aware distillation for SSL under class distribution mismatch.

Pseudo labels and per-instance weights are distilled from a fixed unit-norm
representation space into a small trainable classifier; a reliability-driven
curriculum gradually promotes the most trustworthy pseudo-labeled instances
into the labeled pool while the promotion budget decays to zero.
"""

from .curriculum import (
    AnnotationSet,
    CurriculumConfig,
    RunHistory,
    annotate,
    decay_alpha,
    promote,
    reliability,
    run_wad,
    select_reliable,
)
from .dataset import DatasetState
from .diagnostics import (
    BoundInputs,
    ErrorDecomposition,
    decompose_ssl_error,
    diagnostics_report,
    empirical_xi,
    theorem1_bound,
    weight_group_stats,
)
from .pseudo_labeling import (
    LabeledPool,
    PmiAssignment,
    assign_pseudo_label,
    assign_pseudo_labels_batch,
    similarity_profile,
)
from .repr_core import cosine, cosine_matrix, normalize, normalize_rows
from .student import (
    StudentParams,
    TrainConfig,
    cross_entropy,
    evaluate,
    forward,
    init_student,
    train_step,
    wad_loss,
    wad_loss_and_grads,
)
from .synth_data import ScenarioConfig, generate
from .weighting import WeightFunctionSpec, compute_weight, compute_weights_batch

__version__ = "0.1.0"

__all__ = [
    "AnnotationSet",
    "BoundInputs",
    "CurriculumConfig",
    "DatasetState",
    "ErrorDecomposition",
    "LabeledPool",
    "PmiAssignment",
    "RunHistory",
    "ScenarioConfig",
    "StudentParams",
    "TrainConfig",
    "WeightFunctionSpec",
    "annotate",
    "assign_pseudo_label",
    "assign_pseudo_labels_batch",
    "compute_weight",
    "compute_weights_batch",
    "cosine",
    "cosine_matrix",
    "cross_entropy",
    "decay_alpha",
    "decompose_ssl_error",
    "diagnostics_report",
    "empirical_xi",
    "evaluate",
    "forward",
    "generate",
    "init_student",
    "normalize",
    "normalize_rows",
    "promote",
    "reliability",
    "run_wad",
    "select_reliable",
    "similarity_profile",
    "theorem1_bound",
    "train_step",
    "wad_loss",
    "wad_loss_and_grads",
    "weight_group_stats",
]
