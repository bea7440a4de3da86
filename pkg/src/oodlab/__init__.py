"""oodlab: a desk-scale out-of-distribution detection laboratory.

A 2-D synthetic benchmark (Gaussian classes inside a ring of outlier
clusters), a from-scratch MLP with exact gradients, outlier-aware training
regularizers, adaptive outlier mixing, threshold-based detection metrics,
and a deterministic sweep harness with a CLI.
"""
from .errors import (
    CheckpointError,
    ConfigError,
    InvalidInputError,
    OodLabError,
    TrainingDivergenceError,
)
from .harness import (
    DataConfig,
    Datasets,
    ExperimentConfig,
    HistoryRow,
    ModelConfig,
    OptimConfig,
    RunResult,
    RESULTS_COLUMNS,
    SWEEP_METHODS,
    TrainConfig,
    config_from_dict,
    config_to_dict,
    default_config,
    evaluate,
    export_score_grid,
    load_config,
    load_results_csv,
    make_datasets,
    method_config,
    results_match,
    run_experiment,
    run_sweep,
    save_config,
    train,
    write_history_csv,
    write_report_csv,
    write_results_csv,
)
from .mixing import (
    MIX_KINDS,
    MixStrategy,
    MixedBatch,
    adaptive_weights,
    cutmask_pair,
    diversemix_pair,
    mix_batch,
    vanilla_mixup_pair,
)
from .nn import (
    Gradients,
    LossTerms,
    MlpModel,
    OptimState,
    cross_entropy_from_logits,
    forward,
    init_mlp,
    init_optim,
    load_checkpoint,
    loss_and_grad,
    save_checkpoint,
    sgd_step,
)
from .numerics import (
    RngState,
    beta_sample,
    gamma_sample,
    gaussian_sample,
    logsumexp_rows,
    relu,
    softmax_rows,
)
from .oodcore import (
    REG_VARIANTS,
    SCORE_KINDS,
    DetectionReport,
    RegLossSpec,
    aupr,
    auroc,
    auroc_trapezoid,
    calibrate_gamma,
    detect,
    fpr_at_tpr,
    id_accuracy,
    reg_loss,
    score,
    score_rows,
    write_scores_csv,
)
from .synthdata import (
    GmmSpec,
    LabeledSet,
    OutlierSet,
    load_labeled_csv,
    load_points_csv,
    make_aux_outliers,
    make_id_dataset,
    make_test_ood,
    ring_gmm_spec,
    sample_gmm,
    save_labeled_csv,
    save_outlier_csv,
)

__version__ = "0.1.0"
