"""Exception types shared across the package.

Each error carries a short machine-parseable ``category`` that the CLI
prints on failure.
"""


class HeadcountError(Exception):
    category = "error"


class ConfigError(HeadcountError):
    """Malformed environment, movement-graph, or parameter file."""

    category = "config-error"


class DatasetError(HeadcountError):
    """Malformed activation-line dataset, or a label problem."""

    category = "data-error"


class UsageError(HeadcountError):
    """Inconsistent arguments or an unsupported combination of inputs."""

    category = "usage-error"
