"""Computational harmonic analysis for weighted L^2 spaces on the circle:
LKS weight synthesis, discrete Besov-Dirichlet norms, Green-kernel
potential theory, capacity solvers, multiplier membership tests,
multi-singularity weights, and hidden-spectrum probes."""

__version__ = "0.1.0"

from .seqcore import (GramMatrix, LksError, PreconditionError, SolverFailure,
                      WeightGrid, WindowSeq, analyze, convolve, gram,
                      grid_nodes, synthesize, synthesize_complex,
                      toeplitz_form)
from .weights import (A2Report, ClosedForm, CoeffSeq, IntegrabilityReport,
                      ZeroSet, a2_report, lks_weight, reciprocal_integrable,
                      regular_criterion, schoenberg_pd_check,
                      synthesize_from_profile, weight_from_spec, zero_set)
from .dirichlet import (ComponentInfo, DirichletMatrix, MinimalityReport,
                        components, contraction_check, minimality_report,
                        parseval_check, seminorm, shift_isometry_check)
from .potentials import (CapacityResult, KernelSeq, WeightKernels,
                         apply_potential, capacity, green_kernel,
                         interval_capacity, kernel_identity_residual,
                         riesz_kernels, strong_capacitary_ratio)
from .multipliers import (MultiplierSpec, NuWeight, PairReport, RatioScan,
                          SlpReport, capacitary_constant,
                          commutator_inequality_ratio, duality_transforms,
                          embedding_constant, embedding_constant_green,
                          energy_constant, mu_riesz_sq, mu_weights,
                          multiplier_norm, pair_multiplier_check,
                          quasimetric_report, slp_bounds)
from .singular import (AdjustedDecomposition, CompositeWeightReport,
                       CutoffSpec, PolygonDecomposition, SingularitySet,
                       build_cutoff, composite_weight, conditions_for_pair,
                       cutoff_decompose, polygon_structure,
                       polygon_structure_float, theorem51_check,
                       theorem53_check, theorem59_adjust)
from .spectra import (NuMeasure, SymbolSpec, eigen_residual, resolvent_probe,
                      slp_failure_demo, symbol_multiplier,
                      visible_spectrum_gap, winding_number)
