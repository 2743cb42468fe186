"""diracproj: verification lab for Calderon/Bergman projectors of Dirac operators.

Subpackages
-----------
clifford     Clifford algebra representations, cl(nu), Sigma_pm splitting.
index_sets   Exact algebra of polyhomogeneous index sets and composition rules.
disc         Unit-disc oracles: Poisson operator, K*K spectrum, Calderon and
             Bergman projectors (scalar d-bar model and rank-2 spin model).
symbols      Principal-symbol calculus: scattering/Calderon symbols, the
             boundary-composition half-line integral, log-free moments.
conformal    Torus spectral realization of the conformally covariant cube-type
             operator, curvature of conformally flat metrics, indicial solver.
cli          Command line front end running the verification suites.
"""

from . import clifford, conformal, disc, index_sets, symbols

__version__ = "0.1.0"

__all__ = ["clifford", "conformal", "disc", "index_sets", "symbols", "__version__"]
