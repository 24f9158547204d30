"""Sparsest-representation recovery over Vandermonde frames.

A signal r in C^N synthesized from a coefficient vector of weight
w <= floor(N/2) is recovered exactly: in that regime the minimal-weight
representation is unique, and it is found by the classical algebraic
decoding pipeline run in complex floating point:

    1. syndromes      -- the coordinates of r, read off verbatim;
    2. key equation   -- extended Euclid division on (z^N, S1[z])
                         yields locator sigma and evaluator omega;
    3. root location  -- sigma is evaluated at every inverse node;
    4. value recovery -- Forney's formula, then one least-squares
                         refinement step on the located support;
    5. verification   -- re-synthesize and check the relative residual.

Every decode is self-checking: a result is reported "ok" only when the
re-synthesized signal matches r to the requested tolerance, so the
decoder may reject an input but never silently mis-decodes one.

Numerical stability.  The Euclid recursion is exact-arithmetic math;
in doubles its remainder sequence degrades as the weight approaches
floor(N/2) for N beyond ~16 (leading remainder coefficients suffer
heavy cancellation).  When the Euclid route fails its own
verification, decode falls back to a stabilized locator estimate: the
locator coefficients are re-fit by least squares to the syndrome
recurrence (stacked with the conjugate-reversed syndromes when the
nodes are unit-modulus, which doubles the data and tames clustered
supports), candidate weights are scanned in increasing order, roots
are matched to the nearest inverse node, and each candidate must pass
the synthesis-residual gate.  Worst-case configurations at w = N/2
sit at the edge of double-precision identifiability, so a small
failure rate remains near N = 64 at full weight; failures surface as
non-"ok" statuses, never as wrong answers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateDenominator,
    LengthMismatch,
    NumericBreakdown,
    RootCountMismatch,
    VframeError,
)
from .frames import VANDERMONDE, ZERO_REL_TOL, Frame, SparseRep, synthesize
from .poly import (
    DEGREE_REL_TOL,
    poly_degree,
    poly_divmod,
    poly_eval,
    poly_mul,
    poly_sub,
    poly_trim,
)

# Root acceptance factor: sigma(1/z_j) counts as zero below
# ROOT_ACCEPT_TOL * (1 + max_k |sigma(1/z_k)|).
ROOT_ACCEPT_TOL = 1e-6

# Default relative residual accepted by decode().
RESIDUAL_TOL = 1e-6

# A candidate decodes "exactly" below this residual; the candidate scan
# stops early there, otherwise it keeps looking for a better fit.
STRICT_RESIDUAL = 1e-9

# A candidate weight enters the fallback scan when its syndrome
# recurrence misfit is below this (relative, per sqrt-row).
RECURRENCE_TOL = 1e-6

STATUS_OK = "ok"
STATUS_WEIGHT = "weight_exceeds_half_n"
STATUS_RESIDUAL = "residual_too_large"


@dataclass(frozen=True)
class DecodeOutcome:
    """Result of a decode attempt.

    rep is the recovered representation (empty when no candidate of
    weight <= floor(N/2) survived), residual the relative synthesis
    error of rep, locator_degree the degree of the accepted locator
    (-1 when the key equation already failed).  status "ok" guarantees
    residual <= tolerance and locator_degree == rep.weight.
    """

    rep: SparseRep
    residual: float
    locator_degree: int
    status: str


def syndromes(frame: Frame, r) -> np.ndarray:
    """The N syndrome values of r: its coordinates, read off verbatim.

    The i-th coordinate of a synthesized signal equals the i-th power
    sum sum_j c_j z_j**(i-1) of its coefficients, and annihilating
    vectors have power sums 1..N all zero, so every representation of
    r shares these values.  No linear solve is needed here; the dense
    first-rows solve lives in baseline_representation.
    """
    if frame.kind != VANDERMONDE:
        raise ValueError("syndromes require a vandermonde frame")
    r = np.asarray(r, dtype=complex).ravel()
    if r.size != frame.n:
        raise LengthMismatch(f"signal has length {r.size}, expected {frame.n}")
    return r.copy()


def key_equation_residual(s, sigma, omega) -> float:
    """Max |coefficient| of (S1[z]*sigma[z] - omega[z]) mod z^N."""
    s = np.asarray(s, dtype=complex).ravel()
    n = s.size
    prod = poly_mul(s, sigma)[:n]
    diff = poly_sub(prod, omega)
    return float(np.abs(diff).max()) if diff.size else 0.0


def solve_key_equation(s, t: int, rel_tol: float = DEGREE_REL_TOL):
    """Locator/evaluator pair (sigma, omega) from the syndromes.

    Runs the extended Euclid division algorithm on (z^N, S1[z]) with
    S1[z] = sum_j s_j z**(j-1), stopping at the first remainder of
    degree <= t - 1; sigma is the Bezout multiplier of S1 at that
    step, normalized so sigma(0) = 1, and omega the remainder.  For
    syndromes of a representation of weight w <= t this yields
    deg sigma = w, deg omega <= w - 1 and omega = S1 * sigma
    (mod z^N) to working precision.

    All-zero syndromes return (1, 0), signaling the zero
    representation.  Raises NumericBreakdown when no stable normalized
    solution exists (constant term of the multiplier vanishes).
    """
    s = np.asarray(s, dtype=complex).ravel()
    n = s.size
    if n == 0:
        raise ValueError("need at least one syndrome")
    if not 0 <= t <= n:
        raise ValueError("t must lie in 0..N")
    one = np.ones(1, dtype=complex)
    if np.abs(s).max() == 0.0:
        return one, s[:0]

    r_prev = np.zeros(n + 1, dtype=complex)
    r_prev[n] = 1.0                                # z^N
    r_cur = poly_trim(s, rel_tol)
    v_prev = s[:0]                                 # multipliers of S1
    v_cur = one.copy()
    for _ in range(n + 2):
        if poly_degree(r_cur, rel_tol) <= t - 1:
            break
        q, rem = poly_divmod(r_prev, r_cur, rel_tol)
        v_next = poly_sub(v_prev, poly_mul(q, v_cur))
        r_prev, v_prev = r_cur, v_cur
        r_cur, v_cur = rem, v_next
        # Joint rescale keeps the recursion well-scaled; each (r, v)
        # pair satisfies its own Bezout relation, so pairs may be
        # scaled independently of one another.
        top = np.abs(r_cur).max() if r_cur.size else 0.0
        if top > 0.0:
            r_cur = r_cur / top
            v_cur = v_cur / top
    else:
        raise NumericBreakdown("euclid recursion failed to terminate")

    if v_cur.size == 0 or abs(v_cur[0]) <= 1e-12 * np.abs(v_cur).max():
        raise NumericBreakdown("locator constant term vanished")
    sigma = poly_trim(v_cur / v_cur[0], rel_tol)
    omega = poly_trim(r_cur / v_cur[0], rel_tol)
    return sigma, omega


def find_error_locations(sigma, frame: Frame, tol: float = ROOT_ACCEPT_TOL) -> list[int]:
    """1-based indices j for which 1/z_j is a root of sigma.

    Evaluates sigma at every inverse node and accepts values below
    tol * (1 + the largest evaluation magnitude); the absolute floor
    keeps the test meaningful when every evaluation is small.  The
    accepted count must equal deg sigma, otherwise the weight exceeded
    the decoding radius (or numerics failed) and RootCountMismatch is
    raised.
    """
    if frame.kind != VANDERMONDE:
        raise ValueError("root location requires a vandermonde frame")
    sigma = np.asarray(sigma, dtype=complex)
    if sigma.size == 0 or abs(sigma[0] - 1.0) > 1e-6:
        raise ValueError("locator must be normalized with sigma(0) = 1")
    vals = np.abs(poly_eval(sigma, 1.0 / frame.nodes))
    hits = np.nonzero(vals < tol * (1.0 + vals.max()))[0]
    deg = poly_degree(sigma)
    deg = 0 if deg < 0 else int(deg)
    if hits.size != deg:
        raise RootCountMismatch(
            f"locator degree {deg} but {hits.size} roots among inverse nodes"
        )
    return [int(j) + 1 for j in hits]


def forney_values(sigma, omega, locations, frame: Frame) -> np.ndarray:
    """Coefficient values at the located indices.

    Uses the explicit product form
        Y_j = omega(1/X_j) / prod_{i != j} (1 - X_i / X_j)
    with X_j the located nodes (the empty product is 1).  See
    forney_values_via_derivative for the equivalent derivative form.
    """
    x = frame.nodes[np.asarray(locations, dtype=int) - 1]
    w = x.size
    if w != max(poly_degree(sigma), 0):
        raise ValueError("need exactly deg(sigma) locations")
    if w == 0:
        return np.zeros(0, dtype=complex)
    xinv = 1.0 / x
    factors = 1.0 - np.outer(x, xinv)          # [i, j] = 1 - X_i / X_j
    np.fill_diagonal(factors, 1.0)             # empty product over i == j
    dens = factors.prod(axis=0)
    small = np.abs(dens) <= 1e-12
    if np.any(small):
        j = int(np.nonzero(small)[0][0])
        raise DegenerateDenominator(f"denominator vanished at location {locations[j]}")
    return poly_eval(omega, xinv) / dens


def forney_values_via_derivative(sigma, omega, locations, frame: Frame) -> np.ndarray:
    """Value recovery through the locator derivative.

    For sigma[z] = prod_i (1 - X_i z) the derivative satisfies
    sigma'(1/X_j) = -X_j * prod_{i != j} (1 - X_i / X_j), hence
        Y_j = -X_j * omega(1/X_j) / sigma'(1/X_j),
    identical to the product form of forney_values (note the minus
    sign: the sign-free variant would return the negated values).
    """
    from .poly import poly_derivative

    x = frame.nodes[np.asarray(locations, dtype=int) - 1]
    dsigma = poly_derivative(sigma)
    out = np.zeros(x.size, dtype=complex)
    for j in range(x.size):
        xinv = 1.0 / x[j]
        den = poly_eval(dsigma, xinv)
        if abs(den) <= 1e-12:
            raise DegenerateDenominator(f"sigma' vanished at location {locations[j]}")
        out[j] = -x[j] * poly_eval(omega, xinv) / den
    return out


# -- decode internals ---------------------------------------------------------

def _lstsq(a, b):
    x, *_ = scipy.linalg.lstsq(a, b, lapack_driver="gelsy", check_finite=False)
    return x


def _locator_from_support(s, nodes, locations):
    """Exact-product locator and truncated evaluator for a known support."""
    x = nodes[np.asarray(locations, dtype=int) - 1]
    sigma = np.ones(1, dtype=complex)
    for xi in x:
        sigma = np.convolve(sigma, np.array([1.0, -xi]))
    omega = poly_trim(np.convolve(s, sigma)[: x.size]) if x.size else s[:0]
    return sigma, omega


def _candidate(frame, r, s, locations, norm_r, _collapsed=False):
    """(rep, residual) for a candidate support, or None when unusable.

    Values come from Forney's formula plus one least-squares
    refinement step on the located rows.  Values below the dense zero
    threshold collapse the support (a superset of the true support
    carries near-zero phantom values) and the reduced candidate is
    rebuilt once.
    """
    w = len(locations)
    sigma, omega = _locator_from_support(s, frame.nodes, locations)
    try:
        values = forney_values(sigma, omega, list(locations), frame)
    except DegenerateDenominator:
        return None
    rows = frame.matrix[np.asarray(locations, dtype=int) - 1]
    values = values + _lstsq(rows.T, r - values @ rows)
    if not _collapsed and w:
        keep = np.abs(values) > ZERO_REL_TOL * np.abs(values).max()
        if not np.all(keep):
            reduced = tuple(loc for loc, k in zip(locations, keep) if k)
            return _candidate(frame, r, s, reduced, norm_r, _collapsed=True)
    rep = SparseRep(frame.m, tuple(locations), values)
    residual = float(np.linalg.norm(r - values @ rows) / norm_r) if w else 1.0
    return rep, residual


def _recurrence_fit(s, seqs, w):
    """Least-squares locator tail for weight w plus its relative misfit.

    Fits s_i = -sum_k sigma_k s_{i-k} over every stacked sequence (the
    conjugate-reversed syndromes obey the same recurrence when the
    nodes are unit-modulus, doubling the equations).
    """
    n = s.size
    blocks, rhs = [], []
    for seq in seqs:
        win = np.lib.stride_tricks.sliding_window_view(seq, w)[: n - w]
        blocks.append(win[:, ::-1])
        rhs.append(-seq[w:])
    a = np.vstack(blocks)
    b = np.concatenate(rhs)
    x = _lstsq(a, b)
    misfit = float(np.linalg.norm(a @ x - b))
    scale = np.abs(s).max() * math.sqrt(a.shape[0])
    return np.concatenate((np.ones(1, dtype=complex), x)), misfit / scale


def _recurrence_candidates(s, t, unit_circle):
    """Candidate (weight, locator) pairs from the syndrome recurrence,
    minimal weight first.

    The misfit drops from O(1) to rounding level at the minimal
    recurrence order, so the transition is found by bisection.  Near
    the decoding radius the syndrome matrix can be degenerate enough
    that the misfit dips early, so a window of weights above the
    transition is offered too, always ending at t; phantom roots of
    overshot weights carry near-zero values and collapse in the gate.
    """
    n = s.size
    seqs = [s]
    if unit_circle:
        seqs.append(np.conj(s[::-1]))
    cache: dict[int, tuple[np.ndarray, float]] = {}

    def fits(w):
        if w not in cache:
            cache[w] = _recurrence_fit(s, seqs, w)
        return cache[w][1] <= RECURRENCE_TOL

    if t < 1 or not fits(t):
        return []
    lo, hi = 1, t
    while lo < hi:
        mid = (lo + hi) // 2
        if fits(mid):
            hi = mid
        else:
            lo = mid + 1
    weights = list(range(lo, min(lo + 8, t) + 1))
    if weights[-1] != t:
        weights.append(t)
    out = []
    for w in weights:
        if fits(w):
            out.append((w, cache[w][0]))
    return out


def _match_roots_to_nodes(sigma, nodes):
    """Support matching each locator root to its nearest inverse node;
    None when the roots do not map to distinct nodes."""
    w = sigma.size - 1
    if w == 0:
        return ()
    roots = np.roots(sigma[::-1])
    if roots.size != w or not np.all(np.isfinite(roots)):
        return None
    tiny = np.abs(roots) < 1e-12
    if np.any(tiny):
        return None
    idx = np.abs((1.0 / roots)[:, None] - nodes[None, :]).argmin(axis=1)
    support = tuple(sorted(int(i) + 1 for i in set(idx.tolist())))
    if len(support) != w:
        return None
    return support


def decode(frame: Frame, r, tol: float = RESIDUAL_TOL) -> DecodeOutcome:
    """Recover the unique representation of weight <= floor(N/2), if any.

    Returns status "ok" with the exact sparsest representation when
    one of weight <= floor(N/2) exists; otherwise
    "weight_exceeds_half_n" (no admissible locator was found) or
    "residual_too_large" (best candidate misses r by more than tol in
    relative error).  Failures are reported as data, never raised.
    """
    if frame.kind != VANDERMONDE:
        raise ValueError("decode requires a vandermonde frame")
    r = np.asarray(r, dtype=complex).ravel()
    if r.size != frame.n:
        raise LengthMismatch(f"signal has length {r.size}, expected {frame.n}")
    m, t = frame.m, frame.n // 2
    empty = SparseRep(m, (), np.zeros(0, dtype=complex))
    norm_r = float(np.linalg.norm(r))
    if norm_r == 0.0:
        return DecodeOutcome(empty, 0.0, 0, STATUS_OK)

    s = syndromes(frame, r)
    strict = min(tol, STRICT_RESIDUAL)
    best = None

    def settle(cand):
        nonlocal best
        if cand is not None and (best is None or cand[1] < best[1]):
            best = cand
        return cand is not None and cand[1] <= strict

    # Fast path: Euclid key equation, threshold root location.
    euclid_degree = -1
    try:
        sigma, omega = solve_key_equation(s, t)
        euclid_degree = int(max(poly_degree(sigma), 0))
        if euclid_degree <= t:
            locations = find_error_locations(sigma, frame)
            if settle(_candidate(frame, r, s, tuple(locations), norm_r)):
                rep, residual = best
                return DecodeOutcome(rep, residual, rep.weight, STATUS_OK)
    except VframeError:
        pass

    # Fallback: least-squares locator refit per candidate weight,
    # scanned in increasing order so the minimal weight wins.  Only a
    # strict (machine-level) fit stops the scan; near-fits of the
    # wrong weight stay mere candidates.
    unit_circle = bool(np.all(np.abs(np.abs(frame.nodes) - 1.0) <= 1e-9))
    for w, sigma in _recurrence_candidates(s, t, unit_circle):
        support = _match_roots_to_nodes(sigma, frame.nodes)
        if support is None:
            continue
        if settle(_candidate(frame, r, s, support, norm_r)):
            break

    if best is not None:
        rep, residual = best
        status = STATUS_OK if residual <= tol else STATUS_RESIDUAL
        return DecodeOutcome(rep, residual, rep.weight, status)
    return DecodeOutcome(empty, 1.0, euclid_degree, STATUS_WEIGHT)


def outcome_to_json(outcome: DecodeOutcome) -> dict:
    """JSON-ready dict: status, 1-based support, [re, im] values, residual."""
    return {
        "status": outcome.status,
        "support": list(outcome.rep.support),
        "values": [[float(v.real), float(v.imag)] for v in outcome.rep.values],
        "residual": outcome.residual,
        "locator_degree": outcome.locator_degree,
    }
