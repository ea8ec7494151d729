"""General word-level autocompletion for computer-aided translation.

Pipeline: build completion benchmarks from a parallel corpus, train a
dual-encoder word prediction model (separate per context type or jointly),
complete typed prefixes under a hard vocabulary constraint, and serve
suggestions over HTTP. A translation-table baseline and a noisy-context
robustness probe round out the toolkit.
"""

from .benchmark import (
    ContextType,
    GwlanExample,
    SamplerConfig,
    build_dataset,
    read_dataset,
    write_dataset,
)
from .completer import (
    ModelBundle,
    PrefixIndex,
    Suggestion,
    build_prefix_index,
    complete,
    filter_and_renormalize,
)
from .corpus import (
    MASK,
    MASK_ID,
    PAD,
    PAD_ID,
    UNK,
    UNK_ID,
    ParallelCorpus,
    Vocabulary,
    build_vocab,
    decode,
    encode,
    load_parallel,
)
from .errors import (
    BatchError,
    ConfigError,
    ContextInfeasibleError,
    DivergenceError,
    EmptyCandidateError,
    EmptySentenceError,
    EvalError,
    GwlanError,
    NoCandidateError,
    NoTargetError,
    PairingError,
    SequenceTooLongError,
)
from .evaluator import EvalReport, accuracy, corrupt_context, evaluate, robustness_curve
from .romanize import Romanizer
from .trainer import TrainConfig, TrainReport, TrainResult, train_joint, train_separate
from .transtable import (
    AlignmentModel,
    TranslationTable,
    build_table,
    noise_alternatives,
    predict_baseline,
    train_alignment,
)
from .wpm import WpmConfig, init_params, load_checkpoint, predict_distribution, save_checkpoint

__version__ = "0.1.0"

__all__ = [
    "BatchError",
    "ConfigError",
    "ContextInfeasibleError",
    "ContextType",
    "DivergenceError",
    "EmptyCandidateError",
    "EmptySentenceError",
    "EvalError",
    "EvalReport",
    "GwlanError",
    "GwlanExample",
    "MASK",
    "MASK_ID",
    "ModelBundle",
    "NoCandidateError",
    "NoTargetError",
    "PAD",
    "PAD_ID",
    "PairingError",
    "ParallelCorpus",
    "PrefixIndex",
    "Romanizer",
    "SamplerConfig",
    "SequenceTooLongError",
    "Suggestion",
    "TrainConfig",
    "TrainReport",
    "TrainResult",
    "TranslationTable",
    "AlignmentModel",
    "UNK",
    "UNK_ID",
    "Vocabulary",
    "WpmConfig",
    "accuracy",
    "build_dataset",
    "build_prefix_index",
    "build_table",
    "build_vocab",
    "complete",
    "corrupt_context",
    "decode",
    "encode",
    "evaluate",
    "filter_and_renormalize",
    "init_params",
    "load_checkpoint",
    "load_parallel",
    "noise_alternatives",
    "predict_baseline",
    "predict_distribution",
    "read_dataset",
    "robustness_curve",
    "save_checkpoint",
    "train_alignment",
    "train_joint",
    "train_separate",
    "write_dataset",
]
