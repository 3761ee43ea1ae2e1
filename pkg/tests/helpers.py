"""Shared builders for tests."""

import math

SQRT3x2 = 2.0 * math.sqrt(3.0)


def square(x0, y0, side):
    return [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]
