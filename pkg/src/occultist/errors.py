"""Exception hierarchy shared by all modules."""


class OccultistError(Exception):
    """Base class for library errors."""


class Singular(OccultistError):
    pass


class Indeterminate(OccultistError):
    pass


class DimensionMismatch(OccultistError):
    pass


class DimensionTooLarge(OccultistError):
    pass


class NotProperlyConvex(OccultistError):
    pass


class SignAmbiguous(OccultistError):
    pass


class DegenerateBody(OccultistError):
    pass


class DegenerateSampling(OccultistError):
    pass


class NoCommonChart(OccultistError):
    pass


class PointNotInterior(OccultistError):
    pass


class PreconditionFailed(OccultistError):
    pass


class RelationViolated(OccultistError):
    def __init__(self, edge, element, lhs=None, rhs=None):
        super().__init__(f"relation violated on edge {edge!r} at {element!r}")
        self.edge = edge
        self.element = element
        self.lhs = lhs
        self.rhs = rhs


class UnsupportedGroupKind(OccultistError):
    pass


class UnsupportedGraph(OccultistError):
    pass


class BudgetExceeded(OccultistError):
    pass


class NestingFailed(OccultistError):
    def __init__(self, stage, detail=""):
        super().__init__(f"confinement failed at ({stage}) {detail}".rstrip())
        self.stage = stage
        self.detail = detail


class ConclusionViolated(OccultistError):
    def __init__(self, pair, detail=""):
        super().__init__(f"tree conclusion violated at {pair!r} {detail}".rstrip())
        self.pair = pair
        self.detail = detail


class ChopNotPyramidal(OccultistError):
    pass


class ApexOutside(OccultistError):
    pass


class NoFlagFound(OccultistError):
    def __init__(self, best_margin=None):
        super().__init__(f"no flag found (best margin {best_margin})")
        self.best_margin = best_margin


class AssemblyFailed(OccultistError):
    def __init__(self, stage, detail=""):
        super().__init__(f"assembly failed at {stage} {detail}".rstrip())
        self.stage = stage
        self.detail = detail


class ParseError(OccultistError):
    pass


class SchemaError(OccultistError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class ValidationError(OccultistError):
    pass


class UnknownCommand(OccultistError):
    pass
