"""Dirichlet spectra of -a Laplacian + b (-Laplacian)^s and their Berezin-Li-Yau bounds."""
from .bathtub import BathtubProblem, BathtubSolution, bathtub_bounds, bathtub_oracle_check
from .bounds import DomainMeta, OperatorSpec, liyau_classical, liyau_fractional, mixed_bly_lower
from .discretize import Grid1D, fractional_matrix, gagliardo_form, laplacian_matrix, mixed_matrix
from .eigensolve import Spectrum, generalized_symmetric_eigen, symmetric_eigen
from .embedding import admissible_b_range, discrete_embedding_constant
from .errors import MixBLYError
from .harness import BoundReport, RunConfig, emit_plot_data, proof_diagnostics, run_verification, sweep
from .specfun import normalization_constant

__version__ = "0.1.0"
