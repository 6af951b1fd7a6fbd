"""Error taxonomy. Each error carries the CLI exit code it maps to."""

from __future__ import annotations


class PVError(Exception):
    """Base class; `exit_code` is what the CLI returns for this failure."""

    exit_code = 1


class VerificationFailure(PVError):
    exit_code = 1


class InputError(PVError):
    exit_code = 2


class ExhaustionError(PVError):
    exit_code = 3


# scalar tower
class DenominatorDegenerate(InputError):
    pass


class NoReconstruction(VerificationFailure):
    pass


class InsufficientPrecision(ExhaustionError):
    pass


# diamond
class IllegalCoercion(InputError):
    pass


class NotInF(VerificationFailure):
    pass


# factorization
class SingularResidue(InputError):
    pass


class WindowExhausted(ExhaustionError):
    pass


class PrecisionExhausted(ExhaustionError):
    pass


# groups / torsors / induction
class DegreeOverflow(ExhaustionError):
    pass


class ZeroScalar(InputError):
    pass


class NotClosed(VerificationFailure):
    pass


class FixtureRequired(InputError):
    pass


class NotInvariant(VerificationFailure):
    pass


class NotNormal(InputError):
    pass


class GeneratorAuditFailed(VerificationFailure):
    pass


class BadAction(InputError):
    pass


class PreconditionFailed(InputError):
    pass


# patching / ebp
class SingularFundamentalMatrix(InputError):
    pass


class FactorizationFailed(VerificationFailure):
    pass


class ReconstructionFailed(ExhaustionError):
    pass


class GaugeMismatch(VerificationFailure):
    pass


class BlockEmbeddingUndefined(InputError):
    pass


class RecoveryFailed(VerificationFailure):
    pass


class NonSplitEBP(InputError):
    pass


class SchemaError(InputError):
    pass
