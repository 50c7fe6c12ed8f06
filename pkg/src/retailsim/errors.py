"""Exception types shared across the simulator and analysis modules."""


class RetailSimError(Exception):
    """Base class for all package errors."""


class ConfigError(RetailSimError):
    """A scenario or sweep configuration failed validation.

    ``field`` names the offending entry so the CLI can report it.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ModelBug(RetailSimError):
    """An internal consistency rule was violated; the replication aborts."""


class PastEvent(RetailSimError):
    """Attempt to schedule an event before the current clock."""


class BadDistributionParams(RetailSimError):
    """Distribution parameters outside their valid domain."""


class IllegalTransition(ModelBug):
    """A (state, trigger) pair outside the customer statechart edge set."""


class DoubleAssign(ModelBug):
    """A staff member was assigned a task while already busy."""


class EndWhileIdle(ModelBug):
    """A task end was recorded for a staff member with no task."""


class UnknownKind(RetailSimError):
    """A metric event kind missing from the satisfaction weight table."""


class EmptyClass(RetailSimError):
    """Utilization requested for a role class with no members."""


class StatsError(RetailSimError):
    """Base class for analysis-pipeline errors."""


class TooFewGroups(StatsError):
    """ANOVA needs at least two groups with two observations each."""


class DegenerateVariance(StatsError):
    """Within-group variance is zero; F is undefined."""


class UnbalancedGroups(StatsError):
    """Tukey HSD here requires equal group sizes."""


class BadDf(StatsError):
    """Degrees of freedom must be positive integers."""
