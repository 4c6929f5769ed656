"""Pure-Python cyclic Jacobi sweep for complex Hermitian matrices.

For the pivot ``a[p, q] = r * exp(i*phi)`` the rotation acting on columns
``p, q`` is::

    J = [[ c,               s * exp(i*phi)],
         [-s * exp(-i*phi), c             ]]

with ``t = tan(theta)`` the smaller root of ``t**2 + 2*t*z - 1 = 0``,
``z = (a_qq - a_pp) / (2r)``, ``c = 1/sqrt(1 + t**2)`` and ``s = t*c``.
``J^H A J`` has a zero at ``(p, q)`` and diagonal ``a_pp - t*r``,
``a_qq + t*r``. Pivots negligible against both diagonal entries (or
subnormal) are set to zero without rotating.
"""

from __future__ import annotations

import math

import numpy as np


def _offnorm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    apq = a[p, q]
    r = abs(apq)
    app = a[p, p].real
    aqq = a[q, q].real
    g = 100.0 * r
    if r < 1e-300 or (abs(app) + g == abs(app) and abs(aqq) + g == abs(aqq)):
        a[p, q] = 0.0
        a[q, p] = 0.0
        return
    theta = (aqq - app) / (2.0 * r)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0)), theta)
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    e = apq / r
    ec = e.conjugate()

    x = a[:, p].copy()
    y = a[:, q].copy()
    a[:, p] = c * x - s * ec * y
    a[:, q] = s * e * x + c * y
    x = a[p, :].copy()
    y = a[q, :].copy()
    a[p, :] = c * x - s * e * y
    a[q, :] = s * ec * x + c * y
    x = v[:, p].copy()
    y = v[:, q].copy()
    v[:, p] = c * x - s * ec * y
    v[:, q] = s * e * x + c * y

    a[p, p] = app - t * r
    a[q, q] = aqq + t * r
    a[p, q] = 0.0
    a[q, p] = 0.0


def jacobi_inplace(a: np.ndarray, v: np.ndarray, threshold: float, max_sweeps: int):
    """Run cyclic sweeps until the off-diagonal norm is <= threshold.

    Returns ``(sweeps, offnorm)``.
    """
    n = a.shape[0]
    sweep = 0
    off = _offnorm(a)
    while off > threshold and sweep < max_sweeps:
        for p in range(n - 1):
            for q in range(p + 1, n):
                _rotate(a, v, p, q)
        sweep += 1
        off = _offnorm(a)
    return sweep, off
