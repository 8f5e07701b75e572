"""Structure-preserving DG solver for self-gravitating gas dynamics."""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # in-tree builds put _core next to the package
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
