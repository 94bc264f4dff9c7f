"""Penalized model selection for periodic signals in correlated Gaussian noise.

Thin wrapper around the compiled extension; studies use the same JSON
configuration documents as the command-line tool.
"""

try:  # installed layout: extension lives inside the package
    from ._core import *  # noqa: F401,F403
    from . import _core as _core_mod
except ImportError:  # build-tree layout: extension directory on sys.path
    from _core import *  # noqa: F401,F403
    import _core as _core_mod

__version__ = _core_mod.__version__
