"""Capacity and achievable rates of energy-harvesting transmitters over AWGN channels."""

from . import buffer, capacity, harvest, policy, rng, sim
from .buffer import Architecture, BufferConfig, BufferState, InfeasibleEnergyError
from .capacity import AwgnChannel, InputDistribution
from .harvest import ChiSquare1, ConstantIid, DiscreteIid, PeriodicMix, example_one
from .policy import BudgetedGaussian, HarvestUse, SleepWake, TruncatedGaussian

__all__ = [
    "Architecture", "AwgnChannel", "BudgetedGaussian", "BufferConfig", "BufferState",
    "ChiSquare1", "ConstantIid", "DiscreteIid", "HarvestUse", "InfeasibleEnergyError",
    "InputDistribution", "PeriodicMix", "SleepWake", "TruncatedGaussian", "buffer",
    "capacity", "example_one", "harvest", "policy", "rng", "sim",
]
