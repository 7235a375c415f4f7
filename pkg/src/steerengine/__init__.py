"""Steering-based quantum Szilard engine.

Submodules
----------
qcore      dense one- to four-qubit linear algebra (excited state first)
engine     closed-form work observables, classical bound, quantum demon work
lhs        local-hidden-state ensembles and the classical-demon search
collision  exact collision models for work storage and thermalization
game       red/blue cell protocol simulator
cli        command-line front end
"""
from . import collision, engine, game, lhs, qcore
from ._backend import NAME as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["collision", "engine", "game", "lhs", "qcore", "KERNEL_BACKEND", "__version__"]
