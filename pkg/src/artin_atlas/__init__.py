"""Combinatorial and metric toolkit for two-dimensional Artin groups.

The package is organised around the standard presentation complex of an
Artin group and its metric thickening: defining-graph analysis
(:mod:`artin_atlas.graphs`), Garside normal forms and complex balls for
dihedral Artin groups (:mod:`artin_atlas.dihedral`), angular link
verification (:mod:`artin_atlas.links`), Euclidean reflection-group
patches (:mod:`artin_atlas.coxeter`), planar tilings and their sectors
(:mod:`artin_atlas.tilings`, :mod:`artin_atlas.sectors`), singular disc
diagrams (:mod:`artin_atlas.diagrams`) and coset-level intersection
machinery (:mod:`artin_atlas.intersection`).
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
