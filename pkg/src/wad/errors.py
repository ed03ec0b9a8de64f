"""Exception types shared across the package."""


class WadError(Exception):
    """Base class for all errors raised by this package."""


# --- vector / similarity ---

class ZeroVector(WadError):
    """Normalization of a (near-)zero vector was requested."""


class DimensionMismatch(WadError):
    """Operands have incompatible dimensions."""


# --- pseudo-labeling ---

class EmptyPool(WadError):
    """The labeled pool contains no instances."""


class SingleClassPool(WadError):
    """The labeled pool covers a single class, so no competing class exists."""


# --- weighting ---

class InvalidPair(WadError):
    """The similarity pair violates q <= p."""


# --- student / training ---

class LabelOutOfRange(WadError):
    """A class id is outside [0, K)."""


class EmptyTestSet(WadError):
    """Evaluation was requested on an empty test set."""


class NonFiniteGradient(WadError):
    """A gradient tensor contains NaN or Inf; the run is aborted."""


# --- curriculum ---

class InvalidIndex(WadError):
    """An update index exceeds the total number of scheduled updates."""


class StaleSelection(WadError):
    """A promotion selection references instances no longer unlabeled."""


# --- diagnostics ---

class MissingGroundTruth(WadError):
    """Ground-truth labels or target flags are unavailable."""


class EmptyAnnotations(WadError):
    """An aggregate over annotations was requested on an empty list."""


class InvalidInputs(WadError):
    """Bound inputs violate their admissible ranges."""


# --- synthetic data ---

class CenterSamplingFailed(WadError):
    """Rejection sampling could not place class centers at the requested separation."""


# --- file formats ---

class FormatError(WadError):
    """Base class for file-format violations."""


class BadMagic(FormatError):
    """The file does not start with the expected magic bytes."""


class UnsupportedVersion(FormatError):
    """The format version is not supported by this reader."""


class TruncatedPayload(FormatError):
    """The payload is shorter than the header-implied size."""


class NonUnitEmbedding(FormatError):
    """A stored embedding deviates from unit norm beyond tolerance."""


class IndexGap(FormatError):
    """Sidecar indices are not dense 0..count-1."""


class RowCountMismatch(FormatError):
    """Sidecar row count disagrees with the embedding file."""


class MalformedRow(FormatError):
    """A sidecar row could not be parsed; the message carries the line number."""


# --- configuration ---

class ConfigError(WadError):
    """Invalid experiment configuration; the message names the field path."""
