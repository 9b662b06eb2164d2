"""Verification toolkit for the distributional laws of Brownian motion
indexed by the Brownian tree: exact series identities, closed-form Laplace
transforms, exact-law samplers, discrete tree approximations, and Levy-path
simulations, all tied together by a comparison harness."""

__version__ = "0.1.0"

__all__ = [
    "series",
    "exactlaws",
    "samplers",
    "discretesnake",
    "levycsbp",
    "harness",
]
