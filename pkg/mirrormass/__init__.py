"""
Set up the mirrormass version and global imports.

isort:skip_file
"""

import re
import warnings

from .version import __version__

VERSION_STRING = f"%(prog)s {__version__}"

from .scattering import MirrorModel  # noqa

from .quadrature import QuadratureConfig, integrate  # noqa

from .spectra import (  # noqa
    SpectrumComponent,
    SpectrumMethod,
    compute_spectrum,
    mass_spectrum,
    mean_induced_mass,
)

from .dynamics import SimulationConfig, run_ensemble, run_trajectory, synthesize_noise  # noqa

from .mirrormass import (  # noqa
    run_delay,
    run_mean_mass,
    run_simulation,
    run_spectrum,
    run_verification,
)

__all__ = [
    "MirrorModel",
    "QuadratureConfig",
    "integrate",
    "SpectrumComponent",
    "SpectrumMethod",
    "compute_spectrum",
    "mass_spectrum",
    "mean_induced_mass",
    "SimulationConfig",
    "run_ensemble",
    "run_trajectory",
    "synthesize_noise",
    "run_delay",
    "run_spectrum",
    "run_mean_mass",
    "run_simulation",
    "run_verification",
]

# Make sure that DeprecationWarnings are always shown
# within this package
warnings.filterwarnings(
    "always", category=DeprecationWarning, module=r"^{0}\.".format(re.escape(__name__))
)
