"""Exception types shared across the package."""


class WassersteinParticlesError(Exception):
    """Base class for package errors."""


class ZeroSpacingError(WassersteinParticlesError):
    """A configuration with a zero spacing was passed where the stationary
    density is singular (log-density would be infinite)."""


class StepSizeError(WassersteinParticlesError):
    """Euler step rejected because ``|drift| * dt > 1``.

    Carries enough context to locate the failure in a long run.
    """

    def __init__(self, dt, step_index=None, replica=None, time=None):
        self.dt = dt
        self.step_index = step_index
        self.replica = replica
        self.time = time
        where = ""
        if replica is not None:
            where += f" replica={replica}"
        if time is not None:
            where += f" t={time:g}"
        if step_index is not None:
            where += f" step={step_index}"
        super().__init__(
            f"drift*dt exceeded 1 at{where or ' first step'}: "
            f"reduce dt (currently {dt:g}) or increase delta_reg"
        )


class InfiniteEnergyError(WassersteinParticlesError):
    """Interface state with a non-positive height increment: the logarithmic
    interaction assigns it infinite energy."""


class SamplerDegenerateError(WassersteinParticlesError):
    """Raised after 100 consecutive degenerate (all-zero spacing) draws."""
