"""Shot detection for racquet sports from a wrist-worn microphone and IMU."""

from ._shotfusion import *  # noqa: F401,F403
from ._shotfusion import Error, __doc__  # noqa: F401

__version__ = "0.1.0"
