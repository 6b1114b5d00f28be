"""Multi-indices, l^q norms and l^q ball index sets.

``Lambda_N^q = {k in N_0^d : ||k||_q <= N}`` with q in (0, inf].  Members
are enumerated in lexicographic order by a dimension-by-dimension sweep
that only ever creates admissible prefixes.
"""

import csv
import io
import math

import numpy as np
from scipy.special import gammaln

from .polycore import DomainError

Q_MIN = 1e-3
DEFAULT_MEMBER_CAP = 10 ** 8
# ties ||k||_q == N are members; this absorbs the rounding of k_j**q
TIE_RTOL = 1e-12


class ResourceCapError(RuntimeError):
    """A configured size cap would be exceeded."""


def parse_q(q):
    """Accept a positive real, ``inf``, or strings like '1/2', 'inf'."""
    if isinstance(q, str):
        s = q.strip().lower()
        if s in ("inf", "infinity", "oo"):
            q = math.inf
        elif "/" in s:
            num, den = s.split("/", 1)
            q = float(num) / float(den)
        else:
            q = float(s)
    q = float(q)
    if math.isnan(q) or q < Q_MIN:
        raise DomainError(f"q must be >= {Q_MIN} or inf, got {q!r}")
    return q


class MultiIndex(tuple):
    """A d-tuple of non-negative integers."""

    def __new__(cls, entries):
        vals = tuple(int(v) for v in entries)
        if len(vals) < 1:
            raise DomainError("a multi-index needs d >= 1")
        if any(v < 0 for v in vals):
            raise DomainError(f"multi-index entries must be >= 0, got {vals}")
        return super().__new__(cls, vals)

    @property
    def d(self):
        return len(self)

    @property
    def total(self):
        return sum(self)

    def norm(self, q):
        return lq_norm(self, q)

    @property
    def aleph(self):
        return aleph(self)


def lq_norm(k, q):
    """(sum k_i^q)^(1/q), or max k_i for q = inf."""
    q = parse_q(q)
    k = np.asarray(k, dtype=float)
    if math.isinf(q):
        return float(k.max(initial=0.0))
    if not k.any():
        return 0.0
    return float(np.sum(k ** q) ** (1.0 / q))


def lq_norms(keys, q):
    """Row-wise l^q norms of an (n, d) integer array."""
    q = parse_q(q)
    keys = np.asarray(keys, dtype=float)
    if math.isinf(q):
        return keys.max(axis=-1)
    return np.sum(keys ** q, axis=-1) ** (1.0 / q)


def aleph(k):
    """Number of zero entries."""
    return int(sum(1 for v in k if v == 0))


def in_ball(k, q, N):
    """Membership test ``||k||_q <= N`` with the shared tie tolerance."""
    return lq_norm(k, q) <= N * (1.0 + TIE_RTOL)


def _max_entry(budget, q):
    """Largest integer j with j**q <= budget (tolerant at ties)."""
    if budget < 0:
        return -1
    j = int(math.floor(budget ** (1.0 / q) * (1.0 + TIE_RTOL)))
    while j > 0 and float(j) ** q > budget * (1.0 + TIE_RTOL):
        j -= 1
    while float(j + 1) ** q <= budget * (1.0 + TIE_RTOL):
        j += 1
    return j


class IndexSet:
    """Explicit enumeration of Lambda_N^q in dimension d.

    ``keys`` is an (n, d) int64 array in lexicographic order; ``members``
    gives the same rows as :class:`MultiIndex` tuples.
    """

    def __init__(self, q, N, d, keys):
        self.q = parse_q(q)
        self.N = float(N)
        self.d = int(d)
        keys = np.ascontiguousarray(keys, dtype=np.int64).reshape(-1, self.d)
        keys.setflags(write=False)
        self.keys = keys

    def __len__(self):
        return len(self.keys)

    def __iter__(self):
        return (MultiIndex(row) for row in self.keys)

    def __contains__(self, k):
        k = tuple(k)
        return len(k) == self.d and min(k) >= 0 and in_ball(k, self.q, self.N)

    @property
    def members(self):
        return [MultiIndex(row) for row in self.keys]

    @property
    def max_degrees(self):
        """Largest entry per dimension (0 for an empty set)."""
        if len(self.keys) == 0:
            return np.zeros(self.d, dtype=np.int64)
        return self.keys.max(axis=0)

    def to_csv(self, header=None):
        buf = io.StringIO()
        for line in header or ():
            buf.write(f"# {line}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"k_{j + 1}" for j in range(self.d)])
        w.writerows(self.keys.tolist())
        return buf.getvalue()

    def __repr__(self):
        return f"IndexSet(q={self.q}, N={self.N}, d={self.d}, size={len(self)})"


def enumerate_set(q, N, d, cap=DEFAULT_MEMBER_CAP):
    """Lexicographically ordered members of Lambda_N^q.

    Prefixes are extended one coordinate at a time; each prefix carries the
    remaining budget N^q - sum k_i^q, so no inadmissible index is formed.
    """
    q = parse_q(q)
    N = float(N)
    d = int(d)
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if not math.isfinite(N) or N < 0:
        raise DomainError(f"N must be a finite non-negative real, got {N!r}")

    if math.isinf(q):
        top = int(math.floor(N * (1.0 + TIE_RTOL)))
        size = (top + 1) ** d
        if size > cap:
            raise ResourceCapError(f"|Lambda| = {size} exceeds cap {cap}")
        axes = np.meshgrid(*([np.arange(top + 1)] * d), indexing="ij")
        return IndexSet(q, N, d, np.stack([a.ravel() for a in axes], axis=1))

    budget0 = N ** q
    prefixes = np.zeros((1, 0), dtype=np.int64)
    budgets = np.array([budget0])
    for _ in range(d):
        tops = np.array([_max_entry(b, q) for b in budgets], dtype=np.int64)
        counts = tops + 1
        size = int(counts.sum())
        if size > cap:
            raise ResourceCapError(f"|Lambda| exceeds cap {cap}")
        parent = np.repeat(np.arange(len(prefixes)), counts)
        starts = np.cumsum(counts) - counts
        new = np.arange(size) - np.repeat(starts, counts)
        prefixes = np.concatenate([prefixes[parent], new[:, None]], axis=1)
        budgets = budgets[parent] - new.astype(float) ** q
    return IndexSet(q, N, d, prefixes)


def brute_force_set(q, N, d):
    """Reference enumeration by scanning the box [0, floor(N)]^d."""
    q = parse_q(q)
    top = int(math.floor(float(N) * (1.0 + TIE_RTOL)))
    axes = np.meshgrid(*([np.arange(top + 1)] * d), indexing="ij")
    box = np.stack([a.ravel() for a in axes], axis=1)
    keep = [in_ball(row, q, N) for row in box]
    return box[np.asarray(keep, dtype=bool)]


def ball_volume(q, d):
    """Volume of the unit l^q ball restricted to the positive orthant."""
    q = parse_q(q)
    if math.isinf(q):
        return 1.0
    return math.exp(d * gammaln(1.0 / q + 1.0) - gammaln(d / q + 1.0))


def cardinality_estimate(q, N, d):
    """Continuum estimate N^d V_q of |Lambda_N^q|."""
    return float(N) ** d * ball_volume(q, d)


def efficiency_ratio(q, d):
    """Ratio of ball volumes scaled to equal convergence rate, q against 2.

    d^(d/q - d/2) (Gamma(1/q+1)/Gamma(3/2))^d Gamma(d/2+1)/Gamma(d/q+1).
    """
    q = parse_q(q)
    if not 0 < q < 2:
        raise DomainError("efficiency_ratio compares 0 < q < 2 against q = 2")
    log_r = ((d / q - d / 2.0) * math.log(d) + d * (gammaln(1.0 / q + 1.0) - gammaln(1.5))
             + gammaln(d / 2.0 + 1.0) - gammaln(d / q + 1.0))
    return math.exp(log_r)
