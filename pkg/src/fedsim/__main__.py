"""Allow ``python -m fedsim`` as an alternative to the console script."""

from .cli import entry

entry()
