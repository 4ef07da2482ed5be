"""Class-incremental continual learning in feature space.

Sequential fine-tuning with a slow representation rate and a faster
classifier rate, per-class Gaussian feature statistics instead of stored
exemplars, and post-hoc classifier alignment trained with a
logit-normalized cross-entropy. Includes the matching evaluation metrics
(last / incremental accuracy), CKA similarity, and a linear-probing
harness, all on numpy feature datasets (synthetic or exported from a
pretrained backbone).
"""

from .alignment import AlignConfig, align_classifier, draw_alignment_set
from .analysis import FeatureSnapshot, ProbeConfig, cka, linear_probe
from .dataio import (
    TEST,
    TRAIN,
    FeatureDataset,
    SplitSpec,
    gen_synthetic,
    gen_synthetic_pairs,
    load_dataset,
    make_split,
    save_dataset,
)
from .exceptions import (
    BadFormat,
    DegenerateSnapshot,
    NotPositiveDefinite,
    SlowAlignError,
)
from .linalg import RngState, cholesky, gaussian_scalar, robust_cholesky, sample_mvn
from .losses import (
    LossValue,
    argmax_class,
    logitnorm_ce,
    logitnorm_ce_batch,
    softmax_ce,
    softmax_ce_batch,
)
from .model import (
    Classifier,
    Gradients,
    IdentityHead,
    MlpHead,
    Model,
    backward,
    clone_classifier,
    extend_classifier,
    forward,
    load_model,
    save_model,
)
from .optimizer import SGD, OptimizerConfig, uniform_lr_config
from .protocol import (
    HeadConfig,
    RunConfig,
    RunResult,
    Task,
    TaskStream,
    build_stream,
    evaluate,
    inc_acc,
    last_acc,
    run_report,
    run_seed_sweep,
    run_stream,
)
from .stats import (
    ClassStats,
    StatsBank,
    collect_class_stats,
    load_bank,
    sample_class_features,
    save_bank,
    stats_storage_size,
)

__version__ = "0.1.0"
