"""Loops, their holonomy, and the word identities that decide when holonomy cannot tell loops apart.

Submodules: :mod:`~hoops.words` (free groups and identities),
:mod:`~hoops.geom` (PL loops and their decomposition),
:mod:`~hoops.gauge` (connections and holonomy),
:mod:`~hoops.synth` (connections with prescribed holonomy),
:mod:`~hoops.pathology` (differentiable-case constructions).
"""

__version__ = "0.1.0"
