"""Exact Ext/Tor for strict polynomial functors and functors over finite fields."""

import json

from ._spfh import (
    GenericResult,
    JobError,
    ParseError,
    ResourceCapExceeded,
    acceptance,
    e_infty_ext,
    engine_version,
    ext,
    ffss_series,
    fqcat_ext,
    functor_dim,
    gen_comp_map,
    generic_ext,
    generic_tor,
    gl_exterior_homology,
    normalize,
    strong_phi,
    tor,
    twist_map,
)
from ._spfh import _run_job

__all__ = [
    "GenericResult",
    "JobError",
    "ParseError",
    "ResourceCapExceeded",
    "acceptance",
    "e_infty_ext",
    "engine_version",
    "ext",
    "ffss_series",
    "fqcat_ext",
    "functor_dim",
    "gen_comp_map",
    "generic_ext",
    "generic_tor",
    "gl_exterior_homology",
    "normalize",
    "run_job",
    "strong_phi",
    "tor",
    "twist_map",
]


def run_job(job):
    """Run a driver job given as a dict with the CLI's JSON config keys.

    Returns (document, exit_code), the document being the parsed result.
    """
    text, code = _run_job(json.dumps(job))
    return json.loads(text), code
