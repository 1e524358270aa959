"""Joint Bayesian estimation of transcript expression and differential expression."""

from ._core import (
    dirichlet_logpdf,
    fdr_select,
    gd_logpdf,
    oracle,
    posterior,
    rj_birth,
    rj_death,
    run,
    sample_gd,
    simulate,
)

__all__ = [
    "dirichlet_logpdf",
    "fdr_select",
    "gd_logpdf",
    "oracle",
    "posterior",
    "rj_birth",
    "rj_death",
    "run",
    "sample_gd",
    "simulate",
]
