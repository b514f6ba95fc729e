class GaitSurfaceError(Exception):
    """Base class for errors raised by this package."""


class NoConvergence(GaitSurfaceError):
    pass


class BranchLost(GaitSurfaceError):
    pass


class BranchJump(GaitSurfaceError):
    def __init__(self, index, jump):
        super().__init__(f"branch jump of {jump:.4g} rad at sample {index}")
        self.index = index
        self.jump = jump


class BranchUnavailable(GaitSurfaceError):
    pass


class PathTooCoarse(GaitSurfaceError):
    pass


class ValidationFailed(GaitSurfaceError):
    def __init__(self, report):
        super().__init__(f"gait path failed validation: {len(report.violations)} violation(s)")
        self.report = report
