from .errors import (
    AccuracyError,
    BoundaryOrbit,
    DegenerateDecomposition,
    DomainError,
    HoroRadonError,
    InternalConsistencyError,
    UnsupportedFamily,
)
from .specs import GridSpec, QuadratureSpec
from .sl2core import GroupElement, LieVec
from .variety import HoroChart, HoroPoint, PointY
from .funcspace import FunctionOnY, discrete_series, gaussian_bump, radial_bump
from .radon import TransformGrid, dual_radon, radon, radon_grid, radon_translated
from .spectral import OrbitFunctional, SpectralParam, fourier_A, fourier_Y, fourier_radon_identity
from .groupcase import GroupFunction, GroupPointPair, ds_coefficient, group_radon
