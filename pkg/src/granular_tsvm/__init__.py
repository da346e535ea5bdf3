"""Granular-ball twin support vector machines.

Granulation turns a labeled dataset into a small set of balls (center,
radius, majority label); GBTSVM and LS-GBTSVM fit two nonparallel planes to
the ball centers.  The package also ships the box-QP solver both models use,
a checker for the slack violation bounds, and rank statistics for comparing
classifiers across datasets.
"""

from .dataset import (Dataset, MinMaxRecord, NoiseSpec, SynthSpec, generate_synthetic,
                      inject_label_noise, load_csv, minmax_normalize, save_csv, train_test_split)
from .errors import (ConvergenceError, DegenerateDataError, GranularTSVMError, ParseError,
                     SchemaError, SolverConvergenceError, SolverError, UnsupportedError)
from .granulation import GranularBall, GranulationConfig, GranulationResult, granulate
from .kernels import KernelSpec, gram, kernel_eval
from .model import TwinModel, decision, load_model, predict, save_model
from .numerics import BoxQP, QPSolution, SolverConfig, solve_box_qp

__version__ = "0.1.0"
