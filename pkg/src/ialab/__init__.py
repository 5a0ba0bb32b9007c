"""ialab: interference-mitigation laboratory.

Finite-field ergodic alignment schemes with delay analysis, stochastic
geometry outage bounds with Monte Carlo verification, dense-network
sum-capacity experiments, and group-testing channels with
information-theoretic test-count bounds.
"""

__version__ = "0.1.0"
