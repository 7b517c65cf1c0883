"""bincs: sparse binary compressed-sensing matrices with girth constraints.

Construction (PEG, random regular, Gaussian baselines), exact
restricted-isometry formulas and correlation laws, empirical eigenvalue
certification, greedy/convex sparse recovery, and a seeded Monte Carlo
benchmark harness.
"""

__version__ = "0.1.0"

from . import (  # noqa: F401
    bench,
    bipartite_graph,
    construction,
    matrix_core,
    recovery,
    rip_theory,
    spectral,
)
