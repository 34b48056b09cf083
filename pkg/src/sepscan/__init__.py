"""sepscan: deterministic bipartite separability testing with certificates."""

__version__ = "0.1.0"
