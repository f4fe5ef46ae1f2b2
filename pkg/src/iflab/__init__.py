"""Integer-forcing MIMO numerical laboratory.

Achievable rates of IF / IF-SIC / joint-ML receivers under random unitary
precoding, closed-form worst-case outage bounds, CUE and Jacobi ensemble
samplers, Rayleigh-fading MAC experiments, and a CLI that emits the
experiment tables as CSV/JSON.
"""

__version__ = "0.1.0"
