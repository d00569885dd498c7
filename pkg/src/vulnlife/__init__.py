"""Transitive-vulnerability lifecycle analysis toolkit.

Submodules follow the pipeline order: ``versioning`` (version parsing and
successor selection), ``depgraph`` (corpus ingestion), ``propagation``
(advisory spread and lifetime samples), ``survival`` (Kaplan-Meier),
``distfit`` (distribution fitting and goodness-of-fit), ``regression``
(duration-vs-level least squares), ``model`` (the depth-dependent Gamma
resolution model and corpus simulator), and ``cli``.
"""

__version__ = "0.1.0"
