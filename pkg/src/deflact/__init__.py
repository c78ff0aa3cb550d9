"""deflact: matrix-free iterative regularization with subspace recycling.

Augmented (recycled) Landweber and steepest-descent iterations for linear
ill-posed problems, an experimental nonlinear extension, deterministic
test-problem generators and a CLI harness for deconvolution experiments.
"""

from ._kernels import active_backend
from .errors import (ConfigError, DeflactError, DimensionMismatchError,
                     DivergenceError, RankDeficiencyError)
from .gridio import read_rgrid, write_rgrid
from .harness import (IterationTrace, SweepRow, TraceRow, delta_sweep,
                      discrepancy_stop, first_discrepancy_index,
                      semiconvergence_index)
from .linops import (ConvolutionOperator, DenseOperator, DiagonalOperator,
                     DeflatedOperator, LinearMap, NormalOperator, PsfGrid,
                     deflate, gaussian_psf, norm_estimate, psf_operator)
from .recycle import (BoundReport, KTuple, RecycleSpace, basis_from_solutions,
                      build_recycle_space, error_bounds, gram,
                      inner_products, ritz_vectors, top_eigenvectors)
from .solvers import (SolveConfig, SolveResult, augmented_landweber,
                      augmented_regularize, augmented_steepest_descent,
                      cgne, landweber, steepest_descent)
from .problems import (TestProblem, load_problem, make_blur_problem,
                       make_diagonal_problem, make_nonlinear_toy,
                       save_problem)

__version__ = "0.1.0"
