"""Security-index analysis, sensor-attack detection and correction for
discrete-time LTI systems in polynomial kernel form."""

__version__ = "0.1.0"
