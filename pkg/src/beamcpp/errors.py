"""Exception hierarchy shared by all modules."""


class BeamCppError(Exception):
    pass


class DomainError(BeamCppError, ValueError):
    """Parameter outside the curve interval, or argument outside a formula's domain."""


class DegenerateParametrizationError(BeamCppError, ValueError):
    pass


class DegenerateFrameError(BeamCppError, ValueError):
    """A Frenet normal was required where the curvature is below tolerance."""


class InvalidKinematicsError(BeamCppError, ValueError):
    pass


class AssumptionViolatedError(BeamCppError, ValueError):
    pass


class ProjectionError(BeamCppError, RuntimeError):
    pass


class AmbiguousProjectionError(ProjectionError):
    pass


class ConfigError(BeamCppError, ValueError):
    pass
