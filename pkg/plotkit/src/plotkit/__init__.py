"""Figures from simulator CSV artifacts; no physics computed here."""

__version__ = "0.1.0"

from .figures import FigureResult, FigureSpec, PlotkitError, plot_convergence, plot_density, plot_metric
