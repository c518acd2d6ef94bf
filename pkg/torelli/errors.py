class TorelliError(Exception):
    code: str = "torelli.error"


class DegreeMismatchError(TorelliError):
    code = "polycore.degree_mismatch"


class FormSyntaxError(TorelliError):
    code = "polycore.syntax"

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class InhomogeneousFormError(TorelliError):
    code = "polycore.inhomogeneous"

    def __init__(self, message: str, degrees: set[int] | frozenset[int] = frozenset()) -> None:
        super().__init__(message)
        self.degrees = frozenset(degrees)


class NotInCianiDomainError(TorelliError):
    code = "ciani.not_in_s"


class InvalidMarkedTripleError(TorelliError):
    code = "ciani.invalid_triple"


class RootProductError(TorelliError):
    code = "ciani.root_product"


class MatrixShapeError(TorelliError):
    code = "symplectic.shape"


class NotSymplecticError(TorelliError):
    code = "symplectic.not_symplectic"


class SubgroupMembershipError(TorelliError):
    code = "symplectic.not_in_subgroup"


class GenusOutOfRangeError(TorelliError):
    code = "symplectic.genus_range"


class NotMaximalIsotropicError(TorelliError):
    code = "symplectic.not_maximal"


class NotIsotropicError(TorelliError):
    code = "symplectic.not_isotropic"


class InvalidRiemannMatrixError(TorelliError):
    code = "theta.not_riemann"


class PrecisionTooLowError(TorelliError):
    code = "theta.precision"


class IllConditionedError(TorelliError):
    code = "theta.ill_conditioned"


class DegenerateLatticeError(TorelliError):
    code = "klein.degenerate"


class UnsupportedConfigurationError(TorelliError):
    code = "klein.unsupported"


class PeriodComputationError(TorelliError):
    code = "klein.period_failure"


class RootNotFoundError(TorelliError):
    code = "klein.root_not_found"


class IdentityCheckError(TorelliError):
    """An exact or numeric identity that must hold by construction did not."""
    code = "torelli.invariant"


class InputFormatError(TorelliError):
    code = "io.input_format"

    def __init__(self, message: str, raw_input: str = "") -> None:
        super().__init__(message)
        self.raw_input = raw_input


class ConfigurationError(TorelliError):
    code = "config.invalid"
