"""Contraction bounds for finite-state Markov kernels in Orlicz and L_p norms."""
__version__ = "0.1.0"
