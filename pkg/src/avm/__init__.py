"""Nonlinear oscillatory acoustic vacuum toolkit.

Models a finite lattice of spring-coupled particles oscillating in the
plane, its reduced transverse ("acoustic vacuum") system, the averaged
two-mode slow flow with its closed-form periodic family, and the Melnikov
machinery that predicts which of those periodic orbits persist under small
harmonic forcing.  A shooting module verifies the predictions numerically
and a CLI batches the analyses into CSV/JSON/SVG artifacts.
"""

__version__ = "0.1.0"
