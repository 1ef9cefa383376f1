"""Exception hierarchy. Every error carries a short machine-readable code
so the HTTP layer can map failures onto structured replies."""


class HaloscopeError(Exception):
    code = "error"


class InvalidLassoError(HaloscopeError):
    code = "invalid-lasso"


class DimensionMismatchError(HaloscopeError):
    code = "dimension-mismatch"


class InvalidCameraError(HaloscopeError):
    code = "invalid-camera"


class EmptySelectionError(HaloscopeError):
    code = "empty-selection"


class OutOfDomainError(HaloscopeError):
    code = "out-of-domain"


class NoSuchClusterError(HaloscopeError):
    code = "no-such-cluster"


class CatalogError(HaloscopeError):
    """Base for halo-catalog integrity failures."""
    code = "catalog-error"


class DuplicateHaloIdError(CatalogError):
    code = "duplicate-id"


class BrokenLinkError(CatalogError):
    code = "broken-link"


class BadLinkError(CatalogError):
    code = "bad-link"


class FofViolationError(CatalogError):
    code = "fof-violation"


class NoSuchHaloError(HaloscopeError):
    code = "no-such-halo"


class EmptyTraceError(HaloscopeError):
    code = "empty-trace"


class InvalidPointError(HaloscopeError):
    code = "invalid-point"


class InvalidSpecError(HaloscopeError):
    code = "invalid-spec"


class IncompleteDatasetError(HaloscopeError):
    code = "incomplete-dataset"


class NoActiveSelectionError(HaloscopeError):
    code = "no-active-selection"


class SupersededError(HaloscopeError):
    """A newer request for the same session took over before this one finished."""
    code = "superseded"
