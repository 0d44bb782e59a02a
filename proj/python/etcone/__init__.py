"""Edge-triangle ground state toolkit.

Boundary geometry of the edge/triangle density region, cone perturbation
analysis along the critical directions, and finite-n Metropolis sampling.
All heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
