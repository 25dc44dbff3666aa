"""Exception types shared across the toolbox.

The CLI maps these onto its exit-code contract: `InputError` -> 2,
`HypothesisError` -> 3.  A verdict of "not certified" is a regular
result, never an exception.
"""

__all__ = ["InputError", "HypothesisError"]


class InputError(ValueError):
    """Malformed or inconsistent user input (files, dimensions, arguments)."""


class HypothesisError(RuntimeError):
    """A method's mathematical hypothesis is violated (e.g. unstable model)."""
