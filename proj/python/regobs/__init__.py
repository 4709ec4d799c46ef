"""Regional observability analysis for 2D Neumann diffusion systems."""

try:
    # installed layout: the extension lives inside the package
    from ._regobs import *  # noqa: F401,F403
    from ._regobs import __version__  # noqa: F401
except ImportError:
    # in-tree build: the extension sits on PYTHONPATH next to the package
    from _regobs import *  # noqa: F401,F403
    from _regobs import __version__  # noqa: F401
