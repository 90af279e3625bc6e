"""Composite Gauss-Legendre rules on an interval."""
import math

import numpy as np
from numpy.polynomial.legendre import leggauss


def composite_gauss_legendre(a, b, panels, order=16):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    if panels < 1 or order < 1:
        raise ValueError("panels and order must be positive")
    xg, wg = leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    h = np.diff(edges)
    nodes = edges[:-1, None] + 0.5 * h[:, None] * (xg[None, :] + 1.0)
    weights = 0.5 * h[:, None] * wg[None, :]
    return nodes.ravel(), weights.ravel()


def panels_for(half_waves, order=16, nodes_per_half_wave=8):
    """Panel count giving ``nodes_per_half_wave`` nodes per half-wavelength."""
    return max(1, math.ceil(nodes_per_half_wave * max(half_waves, 1.0) / order))
