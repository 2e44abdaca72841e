"""Error taxonomy shared across the package.

Every exception carries a stable ``code`` string so callers (CLI, bindings)
can report the failure category without parsing messages.
"""


class CodaugError(ValueError):
    """Base class for all data/validation errors raised by this package."""

    code = "CodaugError"


class AllZeroError(CodaugError):
    code = "AllZero"


class NegativeEntryError(CodaugError):
    code = "NegativeEntry"


class DimensionTooSmallError(CodaugError):
    code = "DimensionTooSmall"


class DimensionMismatchError(CodaugError):
    code = "DimensionMismatch"


class ZeroPartError(CodaugError):
    """A log-based operation received a composition with a zero part."""

    code = "ZeroPart"


class NonFiniteError(CodaugError):
    code = "NonFinite"


class LambdaOutOfRangeError(CodaugError):
    code = "LambdaOutOfRange"


class EmptySubcompositionError(CodaugError):
    """A mask left no surviving positive part to renormalize."""

    code = "EmptySubcomposition"


class EmptyTrainingSetError(CodaugError):
    code = "EmptyTrainingSet"


class EmptyDatasetError(CodaugError):
    code = "EmptyDataset"


class EmptyInputError(CodaugError):
    code = "EmptyInput"


class ClassTooSmallError(CodaugError):
    code = "ClassTooSmall"


class SingleClassError(CodaugError):
    code = "SingleClass"


class SingleClassTrainError(CodaugError):
    code = "SingleClassTrain"


class DegenerateBatchError(CodaugError):
    code = "DegenerateBatch"


class ParseError(CodaugError):
    """CSV cell could not be parsed; carries 1-based row/column positions."""

    code = "Parse"

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingLabelColumnError(CodaugError):
    code = "MissingLabelColumn"


class RaggedRowError(ParseError):
    code = "RaggedRow"


class NonNumericFeatureError(ParseError):
    code = "NonNumericFeature"


class CheckpointFormatError(CodaugError):
    """Checkpoint file is corrupt, truncated, or of an unknown version."""

    code = "CheckpointFormat"
