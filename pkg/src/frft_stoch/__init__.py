"""Fractional Fourier transforms of stationary random processes.

Continuous (quadrature) and discrete (eigendecomposition) FRFTs, fractional
Fourier series, seeded Gaussian process ensembles, Monte Carlo estimators of
output statistics and their closed-form predictions.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .dfrft import CovariancePair, DfrftMatrix, apply, build_dfrft, dft_matrix, transform_statistics
from .errors import FrftError, NumericalError, ValidationError
from .estimators import (
    CorrelationSurface,
    DeltaSurface,
    Verdict,
    estimate_autocorr,
    estimate_mean,
    estimate_pseudo_autocorr,
    stationarity_verdict,
)
from .frfs import FrfsConfig, dtfrft, frfs_analyze, frfs_basis, frfs_synthesize
from .frft_kernel import FractionalOrder, SampledSignal, TimeGrid, frft_points, frft_quadrature, hermite, kernel_value
from .processes import Ensemble, ProcessKind, StationaryModel, generate
from .theory import (
    DeltaAcf,
    closed_form_pseudo_autocorr,
    fractional_psd,
    numeric_output_autocorr,
    predicted_autocorr,
    predicted_mean,
    recover_psd_from_output,
)
