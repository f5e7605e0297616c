"""Kernel-density (PNN) classification with Gaussian and skew-normal kernels,
bat-algorithm hyperparameter search, and an imbalanced-classification
evaluation harness."""

from .bat import (
    BatConfig,
    BatSwarmState,
    FitnessEvaluationError,
    FitnessSpec,
    OptimizeResult,
    bat_step,
    cv_fitness,
    init_swarm,
    optimize,
)
from .classifier import (
    Normalization,
    PredictionResult,
    TrainedPNN,
    class_scores,
    fit,
    model_from_dict,
    model_to_dict,
    parzen_density,
    predict_batch,
    predict_proba,
)
from .data import (
    DataError,
    Dataset,
    FoldPlan,
    Normalizer,
    apply_zscore,
    fit_zscore,
    load_csv,
    make_circles,
    make_moons,
    make_spirals,
    save_csv,
    stratified_kfold,
    train_test_split,
)
from .evaluation import (
    EvalReport,
    ModelSpec,
    accuracy,
    auc_roc,
    cross_validated_eval,
    f1_score,
    fold_metrics,
    sample_skew_normal,
)
from .kernels import (
    KernelFamily,
    KernelSpec,
    SkewNormalParams,
    gaussian_kernel,
    skew_normal_kernel,
    skew_normal_mode,
    skew_normal_pdf,
    std_normal_cdf,
)
from .stats import (
    RankTable,
    friedman_test,
    mcb_ranks,
    wilcoxon_signed_rank,
)

__version__ = "0.1.0"
