"""Learning Lindblad dissipation rates from observable time series.

Submodules: ``quantum`` (operators and states), ``bernstein`` (rate
functions), ``simulate`` (master-equation integration), ``models`` (the
benchmark systems), ``dataset``, ``features``, ``nn`` (numpy transformer
regressor), ``inversion`` (analytic rate recovery), ``pipeline`` and
``cli``.
"""
from .bernstein import BernsteinRate
from .models import ModelId, get_spec, instantiate
from .simulate import JumpChannel, LindbladSystem, Trajectory, evolve

__version__ = "0.1.0"

__all__ = ["BernsteinRate", "JumpChannel", "LindbladSystem", "ModelId", "Trajectory", "evolve",
           "get_spec", "instantiate"]
