"""Spectral zeta function of the Dirichlet Laplacian on a surface of revolution."""

from .errors import (BracketError, ConsistencyError, CoverageError, DomainError, FitError,
                     IntegrationError, ProfileError, QuadratureError, RevZetaError)
from .heatkernel import fit_coefficients, geometric_coefficients, heat_trace, stripe_density
from .profile import (Interval, Profile, QuadratureSpec, geometric_invariants, integrate,
                      load_profile, make_profile, profile_from_json, standard_profiles)
from .sturm import (EigenvalueTable, ModeProblem, OdeSpec, count_eigenvalues_below,
                    eigenvalues, log_D, phi_at_zero, shoot, spectrum_below)
from .zeta import determinant, euler_phi, full_special_values, zeta_direct_sum

__version__ = "0.1.0"
