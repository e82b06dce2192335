"""Exact Hodge/Kodaira verification on the q-deformed projective line."""

import json as _json

from _qkahler import QkError, __version__, cohomology_table, q_integer, run

__all__ = [
    "QkError",
    "__version__",
    "cohomology_table",
    "q_integer",
    "run",
    "verify",
    "cohomology",
    "serre",
]


def _run_dict(command, **kwargs):
    return _json.loads(run(command, **kwargs))


def verify(**kwargs):
    """Run the identity-verification suite; returns the report as a dict."""
    return _run_dict("verify", **kwargs)


def cohomology(**kwargs):
    """Cohomology dimension table; returns the report as a dict."""
    return _run_dict("cohomology", **kwargs)


def serre(**kwargs):
    """Serre pairing ranks; returns the report as a dict."""
    return _run_dict("serre", **kwargs)
