from .distribution import (AwgnChannel, InputDistribution, QuadratureError,
                           mutual_information, output_entropy)
from .rates import (ARCHITECTURES, CapacityResult, FitError, HarvestUseCapacity, KtFit,
                    achievable_rate, awgn_capacity, hu_capacity, hus_budget,
                    kt_density, kt_density_check, onoff_decomposition, pe_capacity,
                    peak_average_capacity)
from .solver import ConvergenceError, consolidate, solve_grid

__all__ = [
    "ARCHITECTURES", "AwgnChannel", "CapacityResult", "ConvergenceError", "FitError",
    "HarvestUseCapacity", "InputDistribution", "KtFit", "QuadratureError",
    "achievable_rate", "awgn_capacity", "consolidate", "hu_capacity", "hus_budget",
    "kt_density", "kt_density_check", "mutual_information", "onoff_decomposition",
    "output_entropy", "pe_capacity", "peak_average_capacity", "solve_grid",
]
