import numpy as np

from virasoro_transgression.diffeo import TAU

GRID_256 = np.arange(256) * TAU / 256


def circle_distance(a, b):
    """Distance between angles as points of the circle."""
    d = np.mod(np.asarray(a) - np.asarray(b), TAU)
    return np.minimum(d, TAU - d)


def sup_circle_distance(g1, g2, grid=GRID_256):
    """Sup over a grid of the circle distance between two diffeo images."""
    return float(np.max(circle_distance(g1(grid), g2(grid))))
