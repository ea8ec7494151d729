"""Exception taxonomy for the autocompletion engine."""


class GwlanError(Exception):
    """Base class for all errors raised by this package."""


class PairingError(GwlanError):
    """Source and target files disagree on line count."""


class EmptySentenceError(GwlanError):
    """A corpus line tokenized to zero tokens."""


class NoTargetError(GwlanError):
    """No word in the sentence is eligible as a prediction target."""


class ContextInfeasibleError(GwlanError):
    """The sampled target position admits no context span of the requested type."""


class SequenceTooLongError(GwlanError):
    """Input longer than the model's position table."""


class BatchError(GwlanError):
    """Malformed training batch (empty, or a target outside the vocabulary)."""


class EmptyCandidateError(GwlanError):
    """No vocabulary word's typing form starts with the typed prefix."""


class NoCandidateError(GwlanError):
    """The translation table offers no candidate for the typed prefix."""


class ConfigError(GwlanError):
    """Invalid or inconsistent configuration values."""


class DivergenceError(GwlanError):
    """Training produced non-finite loss or gradients."""


class EvalError(GwlanError):
    """Evaluation inputs are empty or mismatched."""
