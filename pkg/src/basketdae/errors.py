"""Exception taxonomy. The CLI maps these onto exit codes (config/usage
errors -> 2, everything else -> 1)."""


class BasketDaeError(Exception):
    """Base class for all basketdae runtime failures."""


class ConfigError(BasketDaeError):
    """Invalid configuration or usage: bad hyperparameters, missing files,
    unknown labels supplied by the user."""


class IngestError(BasketDaeError):
    """Malformed transaction data (names the offending line where known)."""


class CorruptionError(BasketDaeError):
    """The corruption rejection cap was exhausted; carries the attempt count."""

    def __init__(self, message, attempts=None):
        super().__init__(message)
        self.attempts = attempts


class TrainingError(BasketDaeError):
    """Training aborted: empty training set, non-finite loss or gradients."""


class GenerationError(BasketDaeError):
    """Markov-chain sampling failed; carries the chain step index."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class ModelFormatError(BasketDaeError):
    """Model file cannot be loaded: bad version, truncation, shape mismatch."""
