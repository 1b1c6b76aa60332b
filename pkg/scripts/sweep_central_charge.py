#!/usr/bin/env python3
"""Trace the central charge across transgression scales.

The pipeline is linear: transgressing at scale s yields charge
-96 pi^2 s, so the distinguished scale 1/(8 pi^2) lands on -12.  This
script measures a handful of scales around it and prints the ratio to
the prediction.
"""

import math

from virasoro_transgression import simplicial, witt

DISTINGUISHED = 1.0 / (8.0 * math.pi**2)


def main():
    print(f"{'scale':>14s} {'charge':>14s} {'predicted':>14s} {'ratio':>10s}")
    for scale in (-DISTINGUISHED, 0.0, 0.5 * DISTINGUISHED, DISTINGUISHED, 0.05):
        charge = witt.central_charge(simplicial.transgress(scale))
        predicted = -96.0 * math.pi**2 * scale
        ratio = charge / predicted if predicted else float("nan")
        print(f"{scale:14.6e} {charge:14.6f} {predicted:14.6f} {ratio:10.6f}")


if __name__ == "__main__":
    main()
