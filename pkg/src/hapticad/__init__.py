"""Haptic-glove design pipeline without the hardware.

Calibration of glove position readings, elliptic-ring contour scanning with
lofted OBJ output, spring-rate and hysteresis estimation, and an inverse
actuator network driving a virtual spring open- or closed-loop.
"""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
