"""Constrained minimum-divergence computations on the unit cube.

Thin Python layer over the C++ core: KLinf and f-divergence duals, the
finite-support primal cross-check, mean-preserving discretization
channels, general integral constraints, and the sequential procedures
built on top of them.
"""

try:
    from ._divmin import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # pragma: no cover - build-tree layout
    from _divmin import *  # noqa: F401,F403
