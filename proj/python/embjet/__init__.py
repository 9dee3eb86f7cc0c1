from ._embjet import *  # noqa: F401,F403
from ._embjet import __doc__  # noqa: F401
