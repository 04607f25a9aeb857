"""Exception types raised across the pipeline."""


class ScriptSortError(Exception):
    """Base class for all processing errors."""


class EmptyLineError(ScriptSortError, ValueError):
    pass


class EmptyCropError(ScriptSortError, ValueError):
    pass


class TooFewSamplesError(ScriptSortError, ValueError):
    pass


class SingleClassError(ScriptSortError, ValueError):
    pass


class DimensionMismatchError(ScriptSortError, ValueError):
    pass


class PageOverflowError(ScriptSortError, ValueError):
    """A rendered line or page does not fit the page geometry."""


class MissingLabelError(ScriptSortError, FileNotFoundError):
    pass


class BoxOutOfBoundsError(ScriptSortError, ValueError):
    pass


class ModelFileError(ScriptSortError):
    """Base for model files that cannot be loaded."""


class BadMagicError(ModelFileError):
    pass


class VersionError(ModelFileError):
    pass
