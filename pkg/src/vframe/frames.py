"""Frame construction, signal synthesis and structural checks.

A frame is a spanning set of M >= N non-zero vectors in C^N, stored as
the rows phi_1..phi_M of an M x N matrix.  A coefficient vector c in
C^M synthesizes the signal r = sum_j c_j phi_j.  The Vandermonde kind
has row j equal to (1, z_j, z_j**2, ..., z_j**(N-1)) for distinct
non-zero nodes z_j; any N of its rows are then linearly independent,
which is what makes sparse coefficient recovery well-posed.

Supports are 1-based in all public structures and serialized output
(phi_1 is the first row); array indexing inside this module is 0-based.
Frames, sparse representations and signals are immutable after
construction, so they are safe to share across threads.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BudgetExceeded,
    DegenerateSupport,
    DuplicateNode,
    LengthMismatch,
    TooFewNodes,
    ZeroNode,
)

# Relative singular-value threshold for every rank/singularity decision.
SINGULAR_REL_TOL = 1e-10

# An entry of a dense coefficient vector counts as non-zero when its
# magnitude exceeds this fraction of the largest entry magnitude.
ZERO_REL_TOL = 1e-9

# Relative tolerance under which two nodes count as coincident.
NODE_DISTINCT_REL_TOL = 1e-12

CONDITION_BUDGET = 2_000_000

VANDERMONDE = "vandermonde"
GENERAL = "general"


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Frame:
    """M frame vectors of length N, stored as rows of an M x N matrix.

    kind is "vandermonde" when the rows are the node power sequences of
    the stored nodes, otherwise "general".  Use make_vandermonde_frame
    or make_general_frame rather than the raw constructor.
    """

    matrix: np.ndarray
    kind: str = GENERAL
    nodes: np.ndarray | None = None

    def __post_init__(self):
        mat = np.ascontiguousarray(np.asarray(self.matrix, dtype=complex))
        if mat.ndim != 2:
            raise ValueError("frame matrix must be two-dimensional")
        m, n = mat.shape
        if n < 1 or m < n:
            raise TooFewNodes(f"need M >= N >= 1, got M={m}, N={n}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("frame matrix has non-finite entries")
        row_norms = np.linalg.norm(mat, axis=1)
        if np.any(row_norms == 0.0):
            raise ValueError("frame rows must be non-zero")
        if self.kind == VANDERMONDE:
            if self.nodes is None or len(self.nodes) != m:
                raise ValueError("vandermonde frame needs one node per row")
            object.__setattr__(
                self, "nodes", _readonly(np.asarray(self.nodes, dtype=complex))
            )
        elif self.kind == GENERAL:
            # Vandermonde frames span by construction; general ones must be checked.
            s = np.linalg.svd(mat, compute_uv=False)
            if s[-1] <= SINGULAR_REL_TOL * s[0]:
                raise ValueError("frame rows do not span C^N")
        else:
            raise ValueError(f"unknown frame kind {self.kind!r}")
        object.__setattr__(self, "matrix", _readonly(mat))

    @property
    def m(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.matrix.shape[1]


def make_vandermonde_frame(nodes, n: int) -> Frame:
    """Frame whose row j is (1, z_j, ..., z_j**(n-1)) for the given nodes.

    Nodes must be pairwise distinct and non-zero, both judged relative
    to the largest node magnitude; at least n of them are required.
    """
    z = np.asarray(nodes, dtype=complex).ravel()
    m = z.size
    if n < 1:
        raise ValueError("dimension n must be at least 1")
    if m < n:
        raise TooFewNodes(f"need at least {n} nodes, got {m}")
    if not np.all(np.isfinite(z)):
        raise ValueError("nodes must be finite")
    scale = np.abs(z).max()
    if scale == 0.0 or np.any(np.abs(z) <= NODE_DISTINCT_REL_TOL * scale):
        bad = int(np.argmin(np.abs(z))) + 1
        raise ZeroNode(f"node {bad} is zero (or negligible at this scale)")
    diff = np.abs(z[:, None] - z[None, :])
    diff[np.diag_indices(m)] = np.inf
    i, j = np.unravel_index(np.argmin(diff), diff.shape)
    if diff[i, j] <= NODE_DISTINCT_REL_TOL * scale:
        raise DuplicateNode(f"nodes {min(i, j) + 1} and {max(i, j) + 1} coincide")
    matrix = np.vander(z, n, increasing=True)
    return Frame(matrix=matrix, kind=VANDERMONDE, nodes=z)


def make_general_frame(rows) -> Frame:
    """Frame from an explicit M x N row matrix (must span C^N)."""
    return Frame(matrix=np.asarray(rows, dtype=complex), kind=GENERAL)


def default_nodes(m: int) -> np.ndarray:
    """The m-th roots of unity exp(2*pi*i*j/m), j = 0..m-1.

    Unit-circle nodes keep every square sub-block of the frame as well
    conditioned as possible, and their powers are cheap to tabulate.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    return np.exp(2j * np.pi * np.arange(m) / m)


def make_gaussian_frame(m: int, n: int, seed) -> Frame:
    """Random frame with i.i.d. complex Gaussian rows (seeded)."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    rows = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return make_general_frame(rows / math.sqrt(2.0))


@dataclass(frozen=True)
class SparseRep:
    """Sparse coefficient vector: 1-based support plus complex values.

    The weight of the representation is the support size.  Use
    from_dense to threshold a dense coefficient vector (entries count
    as non-zero above ZERO_REL_TOL times the largest magnitude).
    """

    ambient_len: int
    support: tuple[int, ...]
    values: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        vals = np.atleast_1d(np.asarray(self.values, dtype=complex))
        if len(support) != vals.size:
            raise ValueError("support and values must have equal length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise ValueError("support must be strictly increasing")
        if support and (support[0] < 1 or support[-1] > self.ambient_len):
            raise ValueError("support indices must lie in 1..ambient_len")
        if not np.all(np.isfinite(vals)):
            raise ValueError("values must be finite")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", _readonly(vals))

    @property
    def weight(self) -> int:
        return len(self.support)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.ambient_len, dtype=complex)
        if self.support:
            dense[np.asarray(self.support) - 1] = self.values
        return dense

    @classmethod
    def from_dense(cls, dense, zero_tol: float = ZERO_REL_TOL) -> "SparseRep":
        c = np.asarray(dense, dtype=complex).ravel()
        mags = np.abs(c)
        top = mags.max() if c.size else 0.0
        if top == 0.0:
            return cls(ambient_len=c.size, support=(), values=np.zeros(0, complex))
        idx = np.nonzero(mags > zero_tol * top)[0]
        return cls(
            ambient_len=c.size,
            support=tuple(int(i) + 1 for i in idx),
            values=c[idx],
        )


def random_sparse_rep(m, weight, rng, mag_range=(0.5, 2.0)) -> SparseRep:
    """Random weight-`weight` representation with magnitudes in mag_range."""
    if not 0 <= weight <= m:
        raise ValueError("weight must lie in 0..m")
    support = np.sort(rng.choice(m, size=weight, replace=False)) + 1
    mags = rng.uniform(mag_range[0], mag_range[1], size=weight)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=weight)
    return SparseRep(m, tuple(int(i) for i in support), mags * np.exp(1j * phases))


def synthesize(frame: Frame, rep) -> np.ndarray:
    """Signal r = sum_j c_j phi_j for a SparseRep or dense length-M vector."""
    if isinstance(rep, SparseRep):
        if rep.ambient_len != frame.m:
            raise LengthMismatch(
                f"representation is over {rep.ambient_len} vectors, frame has {frame.m}"
            )
        if not rep.support:
            return np.zeros(frame.n, dtype=complex)
        rows = frame.matrix[np.asarray(rep.support) - 1]
        return rep.values @ rows
    c = np.asarray(rep, dtype=complex).ravel()
    if c.size != frame.m:
        raise LengthMismatch(f"coefficient vector has length {c.size}, frame has {frame.m}")
    return c @ frame.matrix


def check_condition_I(frame: Frame, tol: float = SINGULAR_REL_TOL, budget: int = CONDITION_BUDGET):
    """Check that every N-row submatrix of the frame is non-singular.

    Returns (True, None) when the smallest singular value of every N x N
    submatrix exceeds tol times its largest, else (False, witness) with
    the first violating 1-based row subset in lexicographic order.
    """
    m, n = frame.m, frame.n
    total = math.comb(m, n)
    if total > budget:
        raise BudgetExceeded(f"C({m},{n}) = {total} exceeds budget {budget}")
    combos = itertools.combinations(range(m), n)
    chunk = 4096
    while True:
        batch = list(itertools.islice(combos, chunk))
        if not batch:
            return True, None
        subs = frame.matrix[np.asarray(batch)]          # (B, n, n)
        s = np.linalg.svd(subs, compute_uv=False)       # (B, n)
        bad = np.nonzero(s[:, -1] <= tol * s[:, 0])[0]
        if bad.size:
            witness = tuple(i + 1 for i in batch[int(bad[0])])
            return False, witness


def null_vector_on_support(frame: Frame, rows) -> SparseRep:
    """Coefficient vector annihilating the frame, supported on N+1 given rows.

    For a Vandermonde frame the returned vector always has full weight
    N+1 (no smaller annihilator exists).  The result is normalized so
    its largest-magnitude entry equals 1, and sum_j v_j phi_j = 0 to
    working precision.  Raises DegenerateSupport when the chosen rows
    contain a singular N-row subset (impossible for Vandermonde kind).
    """
    idx = sorted(int(i) for i in rows)
    n = frame.n
    if len(idx) != n + 1 or len(set(idx)) != n + 1:
        raise ValueError(f"need exactly {n + 1} distinct rows")
    if idx[0] < 1 or idx[-1] > frame.m:
        raise ValueError("row indices must lie in 1..M")
    sub = frame.matrix[np.asarray(idx) - 1]             # (n+1, n)
    # v @ sub = 0  <=>  sub.T @ v = 0 (plain transpose: the system is linear in v)
    _, s, vh = np.linalg.svd(sub.T, full_matrices=True)
    if s[-1] <= SINGULAR_REL_TOL * s[0]:
        raise DegenerateSupport("selected rows span fewer than N dimensions")
    v = np.conj(vh[-1])
    k = int(np.argmax(np.abs(v)))
    v = v / v[k]
    if np.abs(v).min() <= ZERO_REL_TOL:
        raise DegenerateSupport("an N-row subset of the selection is singular")
    return SparseRep(frame.m, tuple(idx), v)


def baseline_representation(frame: Frame, r) -> np.ndarray:
    """Dense representation of r supported on the first N frame rows.

    Solves the N x N node-power system formed by rows 1..N (always
    non-singular for a Vandermonde frame) and pads with zeros.  Kept as
    a reference operation; the decoder reads its syndromes directly
    from the coordinates of r instead.
    """
    if frame.kind != VANDERMONDE:
        raise ValueError("baseline representation requires a vandermonde frame")
    r = np.asarray(r, dtype=complex).ravel()
    n, m = frame.n, frame.m
    if r.size != n:
        raise LengthMismatch(f"signal has length {r.size}, expected {n}")
    out = np.zeros(m, dtype=complex)
    out[:n] = np.linalg.solve(frame.matrix[:n].T, r)
    return out


# -- serialization ----------------------------------------------------------
#
# Complex scalars are always [re, im] pairs of IEEE doubles.  A
# vandermonde frame stores only its nodes; the power matrix is
# reconstructed on load.

def _pairs(a: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in np.asarray(a, dtype=complex).ravel()]


def _unpairs(pairs) -> np.ndarray:
    return np.array([complex(p[0], p[1]) for p in pairs], dtype=complex)


def frame_to_json(frame: Frame) -> dict:
    if frame.kind == VANDERMONDE:
        return {
            "n": frame.n,
            "m": frame.m,
            "kind": VANDERMONDE,
            "nodes": _pairs(frame.nodes),
        }
    return {
        "kind": GENERAL,
        "rows": [_pairs(row) for row in frame.matrix],
    }


def frame_from_json(obj: dict) -> Frame:
    kind = obj.get("kind")
    if kind == VANDERMONDE:
        return make_vandermonde_frame(_unpairs(obj["nodes"]), int(obj["n"]))
    if kind == GENERAL:
        return make_general_frame(np.array([_unpairs(row) for row in obj["rows"]]))
    raise ValueError(f"unknown frame kind {kind!r}")


def save_frame(frame: Frame, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(frame_to_json(frame), fh)


def load_frame(path) -> Frame:
    with open(path, "r", encoding="utf-8") as fh:
        return frame_from_json(json.load(fh))


def frame_id(frame: Frame) -> str:
    """Short deterministic identifier (kind, shape, content hash)."""
    payload = frame.nodes if frame.kind == VANDERMONDE else frame.matrix
    digest = hashlib.sha1(np.ascontiguousarray(payload).tobytes()).hexdigest()[:8]
    return f"{frame.kind}:m={frame.m}:n={frame.n}:{digest}"
