import numpy as np


def bisect(fn, y, iterations: int) -> np.ndarray:
    """Invert nondecreasing maps [0, 1] -> [0, 1] elementwise by bisection.

    ``fn`` maps an array of trial points (same shape as ``y``) to values. After
    ``iterations`` halvings the returned midpoint is within ``2**-iterations``
    of the exact preimage.
    """
    if iterations < 1:
        raise ValueError("need at least one bisection iteration")
    y = np.asarray(y, dtype=float)
    a = np.zeros_like(y)
    b = np.ones_like(y)
    x = np.full_like(y, 0.5)
    for _ in range(iterations):
        above = fn(x) > y
        b = np.where(above, x, b)
        a = np.where(above, a, x)
        x = 0.5 * (a + b)
    return x
