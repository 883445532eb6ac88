"""Domain error hierarchy.

Every error carries a stable ``code`` string; HTTP layers serialize it as
``{"error_code": ..., "message": ...}``.
"""


class DomainError(Exception):
    code = "DomainError"

    def __init__(self, message=""):
        super().__init__(message or self.code)
        self.message = message or self.code


class NonUnitQuaternion(DomainError):
    code = "NonUnitQuaternion"


class NonFiniteComponent(DomainError):
    code = "NonFiniteComponent"


class NonMonotonicSeq(DomainError):
    code = "NonMonotonicSeq"


class UpdateBeforeAdd(DomainError):
    code = "UpdateBeforeAdd"


class UnknownWidget(DomainError):
    code = "UnknownWidget"


class UnknownScenario(DomainError):
    code = "UnknownScenario"


class UnknownScreenshot(DomainError):
    code = "UnknownScreenshot"


class DanglingReference(DomainError):
    code = "DanglingReference"


class DuplicateId(DomainError):
    code = "DuplicateId"


class TimestampRegression(DomainError):
    code = "TimestampRegression"


class StorageFull(DomainError):
    code = "StorageFull"


class SchemaMismatch(DomainError):
    code = "SchemaMismatch"


class MissingBlob(DomainError):
    code = "MissingBlob"


class EmptyBlob(DomainError):
    code = "EmptyBlob"


class WrongRole(DomainError):
    code = "WrongRole"


class NoLastWidget(DomainError):
    code = "NoLastWidget"


class VersionConflict(DomainError):
    code = "VersionConflict"


class InvalidCategory(DomainError):
    code = "InvalidCategory"


class InvalidUiTypes(DomainError):
    code = "InvalidUiTypes"


class InvalidSortField(DomainError):
    code = "InvalidSortField"


class InvalidField(DomainError):
    code = "InvalidField"


class InvalidFilterField(DomainError):
    code = "InvalidFilterField"


class InvalidCrop(DomainError):
    code = "InvalidCrop"


class UnannotatedWidget(DomainError):
    code = "UnannotatedWidget"

    def __init__(self, widget_ids):
        self.widget_ids = sorted(widget_ids)
        super().__init__("widgets missing annotations: %s" % ", ".join(self.widget_ids))


class MissingActivityType(DomainError):
    code = "MissingActivityType"


class UnlabeledTask(DomainError):
    code = "UnlabeledTask"


class NoClusters(DomainError):
    code = "NoClusters"


class NoData(DomainError):
    code = "NoData"


class Unreachable(DomainError):
    code = "Unreachable"
