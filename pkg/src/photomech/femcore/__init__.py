"""Hexahedral Galerkin discretization of matter and surrounding free space."""
from .layout import DofLayout, FieldState
from .mesh import Facet, Mesh, box_mesh
from .model import Loads, Model

__all__ = ["DofLayout", "FieldState", "Facet", "Mesh", "box_mesh", "Loads", "Model"]
