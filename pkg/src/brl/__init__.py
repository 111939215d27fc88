"""Numerical laboratory for radial solutions of -Lap^2 u = u^(-p) on R^N.

Submodules:

* params      — admissibility, derived constants, regime classification
* spectra     — sphere eigenvalues and multiplicities
* charpoly    — characteristic quartics, closed-form roots, claim checks
* radial_ode  — adaptive integration of the radial system
* shooting    — critical-threshold search in b
* asymptotics — profile transforms and decay-rate fits
* service/api/cli — command layer, HTTP app, command-line front end
"""

from .params import (  # noqa: F401
    Parameters,
    DerivedConstants,
    Regime,
    admissible,
    derive_constants,
)
from .radial_ode import IVP, Termination, Trajectory, integrate  # noqa: F401
from .shooting import (  # noqa: F401
    ShootingConfig,
    ShootingResult,
    find_b_tilde,
    nonminimal_solution,
)

__version__ = "1.0.0"
