"""Sharp constants for critical Sobolev-type embeddings: exact values, symbolic
tensor identities, Riesz potentials and extremizing-family experiments."""

from .exact_constants import (
    DomainError,
    ExactReal,
    adams_beta0,
    beta_tilde,
    beta_tilde_k,
    bmo_c0,
    ell_constant,
    lambda_constant,
    moser_alpha0,
    render,
    riesz_gamma,
    riesz_gamma_tilde,
    sharp_c,
    sphere_area,
)

__all__ = [
    "DomainError",
    "ExactReal",
    "adams_beta0",
    "beta_tilde",
    "beta_tilde_k",
    "bmo_c0",
    "ell_constant",
    "lambda_constant",
    "moser_alpha0",
    "render",
    "riesz_gamma",
    "riesz_gamma_tilde",
    "sharp_c",
    "sphere_area",
]
