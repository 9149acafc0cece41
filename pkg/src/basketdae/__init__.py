"""Denoising auto-encoder over binary market baskets.

Trains a single-hidden-layer auto-encoder to reconstruct baskets from
support-proportionally corrupted inputs, scores missing-item predictions
under the missing-as-positive convention, and samples synthetic baskets
from the corrupt/reconstruct Markov chain.
"""

from .backends import BACKEND_NAME, available_backends, get_backend
from .corruption import CorruptionProcess, removal_rate
from .data import (
    Dataset,
    ItemCatalog,
    SupportProfile,
    SyntheticSpec,
    estimate_supports,
    parse_transactions,
    serialize_transactions,
    split,
    synth_dataset,
)
from .errors import (
    BasketDaeError,
    ConfigError,
    CorruptionError,
    GenerationError,
    IngestError,
    ModelFormatError,
    TrainingError,
)
from .evaluation import (
    ConfusionMatrix,
    RocCurve,
    discretize,
    evaluate_baskets,
    misclassification_rate,
    rates,
    roc,
)
from .generation import (
    ChainState,
    GenConfig,
    chain_step,
    frequency_report,
    generate,
    sample_reconstruction,
)
from .model import DaeModel, load_model, save_model
from .network import (
    DaeGradients,
    DaeParams,
    ForwardTrace,
    backward,
    forward,
    init_params,
    loss,
)
from .optimizer import AdamState, ClipSchedule, adam_step, clip
from .training import TrainConfig, TrainLog, WalkbackConfig, sweep_hidden, sweep_threshold, train, walkback_samples

__version__ = "0.1.0"
