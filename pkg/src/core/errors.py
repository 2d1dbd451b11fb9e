from __future__ import annotations


class NumericFailure(RuntimeError):
    """Non-finite value reached an optimizer step or a loss."""


class ConfigError(ValueError):
    pass


class CsvSchemaError(ValueError):
    pass
