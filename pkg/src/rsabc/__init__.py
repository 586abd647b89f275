"""Branch-and-cut for routing and spectrum allocation on a DSL-BF integer model."""
from .instance import CanonicalSolution, Demand, Digraph, Instance, load_instance, parse_instance
from .model import Model, build_model

__all__ = ["CanonicalSolution", "Demand", "Digraph", "Instance", "Model", "build_model",
           "load_instance", "parse_instance"]
