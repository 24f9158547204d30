"""Dense polynomial arithmetic over complex double coefficients.

Coefficient arrays run low to high: ``p[k]`` multiplies ``z**k``.  The
zero polynomial is the empty array and has degree ``-inf``.  Degree
decisions ignore trailing coefficients below ``DEGREE_REL_TOL`` times
the largest coefficient magnitude, so floating-point residue does not
inflate degrees.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DivideByZeroPoly

DEGREE_REL_TOL = 1e-9

NEG_INF = -math.inf


def as_poly(coeffs) -> np.ndarray:
    """Coerce to a 1-D complex coefficient array (no trimming)."""
    p = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    if p.ndim != 1:
        raise ValueError("polynomial coefficients must be one-dimensional")
    return p


def poly_trim(p, rel_tol: float = DEGREE_REL_TOL) -> np.ndarray:
    """Drop trailing coefficients below rel_tol times the max magnitude."""
    p = as_poly(p)
    if p.size == 0:
        return p
    mags = np.abs(p)
    top = mags.max()
    if top == 0.0:
        return p[:0]
    keep = np.nonzero(mags > rel_tol * top)[0]
    if keep.size == 0:
        return p[:0]
    return p[: keep[-1] + 1]


def poly_degree(p, rel_tol: float = DEGREE_REL_TOL):
    """Degree after trimming; -inf for the zero polynomial."""
    t = poly_trim(p, rel_tol)
    return NEG_INF if t.size == 0 else t.size - 1


def poly_eval(p, z):
    """Evaluate by Horner's scheme; z may be a scalar or an array."""
    p = as_poly(p)
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for c in p[::-1]:
        out = out * z + c
    return complex(out) if out.ndim == 0 else out


def poly_add(p, q) -> np.ndarray:
    p, q = as_poly(p), as_poly(q)
    if p.size < q.size:
        p, q = q, p
    out = p.copy()
    out[: q.size] += q
    return out


def poly_sub(p, q) -> np.ndarray:
    return poly_add(p, poly_scale(q, -1.0))


def poly_scale(p, a) -> np.ndarray:
    return as_poly(p) * complex(a)


def poly_mul(p, q) -> np.ndarray:
    p, q = as_poly(p), as_poly(q)
    if p.size == 0 or q.size == 0:
        return p[:0]
    return np.convolve(p, q)


def poly_divmod(p, q, rel_tol: float = DEGREE_REL_TOL):
    """Quotient and remainder of p by q with deg(rem) < deg(q).

    Raises DivideByZeroPoly when q trims to the zero polynomial.
    """
    p = poly_trim(p, rel_tol)
    q = poly_trim(q, rel_tol)
    if q.size == 0:
        raise DivideByZeroPoly("division by the zero polynomial")
    if p.size < q.size:
        return p[:0], p
    dq = q.size - 1
    lead = q[-1]
    rem = p.copy()
    quot = np.zeros(p.size - dq, dtype=complex)
    for k in range(p.size - q.size, -1, -1):
        c = rem[dq + k] / lead
        quot[k] = c
        rem[k : dq + k + 1] -= c * q
    # positions dq and above are eliminated exactly; drop their dust
    return quot, poly_trim(rem[:dq], rel_tol)


def poly_derivative(p) -> np.ndarray:
    p = as_poly(p)
    if p.size <= 1:
        return p[:0]
    return p[1:] * np.arange(1, p.size)
