"""Bessel-type special functions used by the arrival-time kernels.

The Weyl-quantized time kernel needs the confluent limit function
0F1(;1;z), which reduces to ordinary and modified Bessel functions of
order zero:

    0F1(;1;z) = I0(2*sqrt(z))    for z >= 0,
    0F1(;1;z) = J0(2*sqrt(-z))   for z < 0.

J0 and I0 themselves come from scipy.special (Cephes), which is accurate
to machine precision on the argument ranges this package touches; the
identity mapping above is cross-checked against scipy's direct hyp0f1 in
the test suite to 1e-12.
"""

from __future__ import annotations

import numpy as np
from scipy.special import i0 as _i0
from scipy.special import j0 as _j0

# i0 overflows near z ~ 713; keep a guarded ceiling so kernel evaluations
# fail loudly instead of returning inf.
_I0_ARG_MAX = 700.0


def bessel_j0(z):
    """Order-zero Bessel function of the first kind, vectorized."""
    return _j0(np.asarray(z, dtype=float))


def bessel_i0(z):
    """Order-zero modified Bessel function, vectorized.

    Raises OverflowError for arguments beyond the double-precision range
    rather than silently producing inf.
    """
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > _I0_ARG_MAX):
        raise OverflowError(
            f"bessel_i0 argument exceeds {_I0_ARG_MAX}; result would overflow"
        )
    return _i0(z)


def hyp0f1_unit(z):
    """0F1(;1;z) for real z of either sign, via the I0/J0 identities.

    Scalar in, scalar out; array in, array out.
    """
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    root = 2.0 * np.sqrt(np.abs(z))
    out = np.empty_like(z)
    pos = z >= 0.0
    if np.any(pos):
        out[pos] = bessel_i0(root[pos])
    if np.any(~pos):
        out[~pos] = _j0(root[~pos])
    return out[0] if scalar else out
