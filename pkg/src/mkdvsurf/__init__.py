"""Tori of revolution, their Dirac potentials and the mKdV hierarchy."""
from __future__ import annotations

from .errors import MkdvSurfError
from .flow import FlowState, evolve, miura_intertwining
from .geometry import (LINE, TORUS, CurvatureReport, ProfileCurve, SpinorPair, SurfaceMesh, closure_defect,
                       conformal_reparametrize, curvatures, direct_mesh, potential_from_profile, preset,
                       profile_from_csv, profile_from_tau, spinors_from_profile, weierstrass_reconstruct)
from .hierarchy import (InvariantReport, closed_form_invariants, closure_functionals, explicit_rhs_n1,
                        explicit_rhs_n2, hierarchy_rhs, invariants, kdv_rhs, kruskal_densities, miura,
                        periodic_spinors, stationarity_fit, zero_curvature_residual)
from .periodic import LineSamples, PeriodicSamples
from .potential import Potential
from .transforms import dual_potential, dual_profile, invert_profile, inverted_potential_origin

__version__ = "0.1.0"
