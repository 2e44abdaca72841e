"""Augmentation and representation learning for compositional data."""

from .augment import (
    AugmentationConfig,
    LabeledSample,
    Strategy,
    aitchison_mixup_core,
    augment_dataset,
    compositional_cutmix_core,
    multinomial_resample_core,
    random_subcomposition_core,
    sample_augmented,
)
from .benchmark import (
    LogisticModel,
    SynthBenchConfig,
    make_two_cluster_dataset,
    render_report,
    synth_benchmark,
    train_weighted_logreg,
)
from .contrastive import (
    ContrastiveConfig,
    EncoderState,
    finetune,
    forward,
    linear_eval,
    load_checkpoint,
    nt_xent_loss,
    pretrain,
    save_checkpoint,
)
from .data import Dataset, SplitSpec, class_prior, load_csv, split, write_csv
from .geometry import (
    ClrVector,
    Composition,
    clr,
    clr_inv,
    close,
    distance,
    inner_product,
    perturb,
    power,
)
from .metrics import CalibrationReport, ece, roc_auc
from .preprocess import (
    DEFAULT_LIBRARY_SIZE,
    infer_library_size,
    normalize_rows,
    zero_replace,
)

__version__ = "0.1.0"
