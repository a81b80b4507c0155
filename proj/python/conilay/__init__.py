"""Spectral laboratory for the Dirichlet Laplacian on conical layers.

Thin Python facade over the C++ core: special functions, the effective
transverse potential, meridian-domain eigenvalue solves and the asymptotic
laws used by the verification suite.
"""

try:
    from ._conilay import *  # noqa: F401,F403  (installed package layout)
    from ._conilay import __version__  # noqa: F401
except ImportError:  # in-tree use: module built by CMake on sys.path
    from _conilay import *  # noqa: F401,F403
    from _conilay import __version__  # noqa: F401
