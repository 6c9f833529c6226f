"""Mode-wise Hankel, weighted dbar and Schrodinger diagnostics on rotation-invariant Hartogs domains."""

from .errors import (ConvergenceError, DomainError, HartogsLabError, IllConditionedGramError,
                     PreconditionError, ProfileCrossingError)
from .logspace import LogValue
from .domain import (HartogsDomain, PlanarGrid, RadialProfile, Region, disc, fiber_interval,
                     make_domain, make_grid, parse_profile, parse_region)
from .moments import (Annulus, distance_moment, lemma1_constant, mode_l2_norm, moment_ratio,
                      radial_moment, sobolev_surrogate_ratio)
from .bergman import (canonical_solution, fiber_weight, one_norm_bound_check, orthogonality_residual,
                      weight_sandwich_check, weighted_gram)
from .hankel import (compactness_probe, hankel_mode, hankel_mode_norm_ratio, verify_mode_reduction)
from .spectral import (divergence_diagnostic, electric_ground_state, harmonic_patch_bound,
                       magnetic_ground_state)
from .pcert import CertificateSpec, make_certificate, tangential_hessian_check
from .zoo import ZooEntry, zoo, zoo_entry

__version__ = "0.1.0"
