"""csp-extform: extended LP formulations for bounded-treewidth CSPs, solved exactly."""

__version__ = "0.1.0"
