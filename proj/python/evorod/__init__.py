"""Special Cosserat rods with evolving natural configurations.

Thin python surface over the C++ core: kinematics helpers, the quadratic
energy family, the isolated-torsion solvers, and the verification oracles.
"""

from ._evorod import *  # noqa: F401,F403
from ._evorod import __doc__  # noqa: F401

__version__ = "0.1.0"
