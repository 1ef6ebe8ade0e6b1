"""Polytopes over the Boolean cube: membership, regularity, standardization.

A polytope here is an intersection of m halfspaces over {-1,+1}^n, stored
as a weight matrix A (m x n, 64-bit floats) and a threshold vector b:
a point u belongs to it iff A_i . u <= b_i for every row i.  Comparisons
are exact (no epsilon): the generator's guarantees are distributional, and
injecting tolerances would silently change the function being fooled.

A weight vector w is tau-regular when max_j |w_j| <= tau * ||w||_2.  The
tau-critical index of w is the least position j (after sorting by
decreasing magnitude) at which the suffix (w_j, ..., w_n) is tau-regular.
A row is (k,tau)-standardized when it splits into a head of at most k
coordinates and a tau-regular tail of 2-norm exactly 1.

`standardize` rewrites each row into that form:

* rows whose critical index is at most k are rescaled by 1/||tail||_2
  (together with their threshold), which does not change the Boolean
  function;
* the remaining rows keep their k largest-magnitude coordinates as the
  head, zero the tail, replace the zeros with a common small eta > 0
  verified (by head-sum enumeration) not to change the Boolean function
  of the truncated row, and rescale the row and threshold so the tail has
  2-norm 1.

Ties in head selection break by (|weight| descending, index ascending).
"""

from __future__ import annotations

import enum
import io
import json
import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Polytope:
    """Intersection of m halfspaces 1[A_i . u <= b_i] over {-1,+1}^n."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if A.ndim != 2 or b.ndim != 1:
            raise ValueError("A must be a matrix and b a vector")
        if A.shape[0] != b.shape[0]:
            raise ValueError(f"A has {A.shape[0]} rows but b has {b.shape[0]} entries")
        if A.shape[0] < 1 or A.shape[1] < 1:
            raise ValueError("need m >= 1 and n >= 1")
        if not (np.isfinite(A).all() and np.isfinite(b).all()):
            raise ValueError("weights and thresholds must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def to_json(self, domain: str = "pm1") -> str:
        return json.dumps(
            {"domain": domain, "A": self.A.tolist(), "b": self.b.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "Polytope":
        doc = json.loads(text)
        if doc.get("domain", "pm1") == "zero_one":
            return zero_one_transform(doc["A"], doc["b"])
        return cls(np.asarray(doc["A"]), np.asarray(doc["b"]))


class BoundaryClass(enum.Enum):
    DEEP_INSIDE = "deep_inside"
    INNER_BOUNDARY = "inner_boundary"
    OUTER_BOUNDARY = "outer_boundary"
    OUTSIDE = "outside"


def membership(p: Polytope, u: np.ndarray) -> bool:
    """True iff A_i . u <= b_i for every row i."""
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (p.n,):
        raise ValueError(f"point has shape {u.shape}, expected ({p.n},)")
    return bool((p.A @ u <= p.b).all())


def classify(p: Polytope, width: float, u: np.ndarray) -> BoundaryClass:
    """Partition the cube by distance-to-surface at scale `width` (> 0).

    deep_inside:    Au <= b - width (componentwise)
    inner_boundary: Au <= b but some A_i.u > b_i - width
    outer_boundary: Au <= b + width but not Au <= b
    outside:        some A_i.u > b_i + width
    """
    if width <= 0:
        raise ValueError("width must be > 0")
    u = np.asarray(u, dtype=np.float64)
    if u.shape != (p.n,):
        raise ValueError(f"point has shape {u.shape}, expected ({p.n},)")
    v = p.A @ u
    if (v <= p.b).all():
        if (v <= p.b - width).all():
            return BoundaryClass.DEEP_INSIDE
        return BoundaryClass.INNER_BOUNDARY
    if (v <= p.b + width).all():
        return BoundaryClass.OUTER_BOUNDARY
    return BoundaryClass.OUTSIDE


def is_tau_regular(w: np.ndarray, tau: float) -> bool:
    """True iff max |w_j| <= tau * ||w||_2.  The zero vector is rejected."""
    w = np.asarray(w, dtype=np.float64)
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise ValueError("regularity is undefined for the zero vector")
    return float(np.max(np.abs(w))) <= tau * norm


def critical_index(w: np.ndarray, tau: float) -> tuple[int | float, np.ndarray]:
    """Least j (1-based, in decreasing-|w| order) with a tau-regular suffix.

    Returns (j, order) where order is the sorting permutation used
    (|weight| descending, index ascending), or (math.inf, order) when no
    suffix is tau-regular.  All-zero suffixes count as not regular.
    """
    w = np.asarray(w, dtype=np.float64)
    if not np.any(w):
        raise ValueError("critical index is undefined for the zero vector")
    n = w.shape[0]
    order = np.lexsort((np.arange(n), -np.abs(w)))
    sw = np.abs(w[order])
    # suffix_sq[j] = sum of squares of sw[j:]
    suffix_sq = np.concatenate([np.cumsum(sw[::-1] ** 2)[::-1], [0.0]])
    for j in range(n):
        norm = math.sqrt(suffix_sq[j])
        if norm > 0.0 and sw[j] <= tau * norm:
            return j + 1, order
    return math.inf, order


@dataclass(frozen=True)
class RowDecomposition:
    """Head/tail split of one standardized row."""

    head: tuple[int, ...]
    tail: tuple[int, ...]
    tail_norm: float


@dataclass(frozen=True)
class StandardizedPolytope:
    """Result of the standardization transform.

    provenance is one of "rescaled", "truncated+perturbed", or "identity"
    (the last only in the trivial regime k > n/2, when the transform is a
    flagged pass-through).  eta records the perturbation magnitude used on
    truncated rows (None elsewhere); eta_verified is False only when the
    head was too large to enumerate and eta was accepted unverified.
    """

    poly: Polytope
    rows: tuple[RowDecomposition, ...]
    provenance: tuple[str, ...]
    trivial_regime: bool
    eta: tuple[float | None, ...]
    eta_verified: tuple[bool, ...]

    def rows_to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("row,provenance,head_size,head_indices,tail_norm,eta,eta_verified\n")
        for i, (dec, prov) in enumerate(zip(self.rows, self.provenance)):
            head = ";".join(str(j) for j in dec.head)
            eta = "" if self.eta[i] is None else format(self.eta[i], ".17g")
            buf.write(
                f"{i},{prov},{len(dec.head)},{head},"
                f"{format(dec.tail_norm, '.17g')},{eta},{self.eta_verified[i]}\n"
            )
        return buf.getvalue()


# Enumerating head subset-sums is 2^|head| work; beyond this cap eta is
# accepted unverified.
HEAD_ENUM_CAP = 24


def _head_sums(weights: np.ndarray) -> np.ndarray:
    """All 2^h values of w . x over x in {-1,+1}^h."""
    sums = np.zeros(1)
    for wj in weights:
        sums = np.concatenate([sums - wj, sums + wj])
    return sums


def _truncate_and_perturb(
    row: np.ndarray, b_i: float, head_idx: np.ndarray, n: int
) -> tuple[np.ndarray, float, float, bool]:
    """Zero the tail, pick eta, rescale; returns (row', b', eta, verified).

    eta starts at 2^-40 * (|b_i| + ||row||_1 + 1) / (n - k) and is halved
    up to 20 times until the truncated row's Boolean function is verified
    unchanged by head-sum enumeration.  If some head sum hits b_i exactly
    no eta works; the threshold is first nudged up to the midpoint of the
    empty gap above it (which leaves the truncated function unchanged).
    """
    k = len(head_idx)
    tail_count = n - k
    head_w = row[head_idx]
    eta0 = 2.0**-40 * (abs(b_i) + float(np.abs(row).sum()) + 1.0) / tail_count

    if k > HEAD_ENUM_CAP:
        return _assemble(row, head_idx, b_i, eta0, n), b_i, eta0, False

    sums = _head_sums(head_w)
    b_adj = b_i
    if np.any(sums == b_i):
        above = sums[sums > b_i]
        # Midpoint of the empty gap above b_i; with no achievable value
        # above, any increase works.
        b_adj = (b_i + float(above.min())) / 2.0 if above.size else b_i + 1.0
    eta = eta0
    for _ in range(21):
        lo, hi = b_adj - eta * tail_count, b_adj + eta * tail_count
        if not np.any((sums > lo) & (sums <= hi)):
            break
        eta /= 2.0
    else:
        raise ArithmeticError(
            "could not find an eta preserving the truncated row's function"
        )
    return _assemble(row, head_idx, b_adj, eta, n), b_adj, eta, True


def _assemble(
    row: np.ndarray, head_idx: np.ndarray, b_i: float, eta: float, n: int
) -> np.ndarray:
    out = np.zeros(n)
    out[head_idx] = row[head_idx]
    tail_mask = np.ones(n, dtype=bool)
    tail_mask[head_idx] = False
    out[tail_mask] = eta
    return out


def standardize(p: Polytope, k: int, tau: float) -> StandardizedPolytope:
    """Rewrite every row of p into (k,tau)-standardized form.

    Requires k <= n/2; larger k is the trivial regime and yields a flagged
    identity pass-through rather than an error.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    m, n = p.m, p.n
    if k > n / 2:
        rows = tuple(
            RowDecomposition(head=(), tail=tuple(range(n)), tail_norm=float(np.linalg.norm(p.A[i])))
            for i in range(m)
        )
        return StandardizedPolytope(
            poly=p,
            rows=rows,
            provenance=("identity",) * m,
            trivial_regime=True,
            eta=(None,) * m,
            eta_verified=(True,) * m,
        )

    A_out = np.array(p.A, dtype=np.float64)
    b_out = np.array(p.b, dtype=np.float64)
    rows: list[RowDecomposition] = []
    provenance: list[str] = []
    etas: list[float | None] = []
    verified: list[bool] = []

    for i in range(m):
        row = p.A[i]
        if not np.any(row):
            raise ValueError(f"row {i} is identically zero")
        crit, order = critical_index(row, tau)
        if crit <= k:
            head_idx = order[: int(crit) - 1]
            tail_idx = order[int(crit) - 1 :]
            tail_norm = float(np.linalg.norm(row[tail_idx]))
            A_out[i] = row / tail_norm
            b_out[i] = p.b[i] / tail_norm
            provenance.append("rescaled")
            etas.append(None)
            verified.append(True)
        else:
            head_idx = order[:k]
            tail_idx = order[k:]
            new_row, b_adj, eta, ok = _truncate_and_perturb(row, float(p.b[i]), head_idx, n)
            tail_norm = float(np.linalg.norm(new_row[tail_idx]))
            A_out[i] = new_row / tail_norm
            b_out[i] = b_adj / tail_norm
            provenance.append("truncated+perturbed")
            etas.append(eta)
            verified.append(ok)
        rows.append(
            RowDecomposition(
                head=tuple(int(j) for j in sorted(head_idx)),
                tail=tuple(int(j) for j in sorted(tail_idx)),
                tail_norm=float(np.linalg.norm(A_out[i][sorted(tail_idx)])),
            )
        )

    return StandardizedPolytope(
        poly=Polytope(A_out, b_out),
        rows=tuple(rows),
        provenance=tuple(provenance),
        trivial_regime=False,
        eta=tuple(etas),
        eta_verified=tuple(verified),
    )


def head_tail_matrices(sp: StandardizedPolytope) -> tuple[np.ndarray, np.ndarray]:
    """Split A' as H + T with H supported on heads and T on tails."""
    A = sp.poly.A
    H = np.zeros_like(A)
    T = np.zeros_like(A)
    for i, dec in enumerate(sp.rows):
        H[i, list(dec.head)] = A[i, list(dec.head)]
        T[i, list(dec.tail)] = A[i, list(dec.tail)]
    return H, T


def zero_one_transform(A01, b01) -> Polytope:
    """Rewrite a system over {0,1}^n as a polytope over {-1,+1}^n.

    With the bijection x = (1+u)/2:  A01 x <= b01 iff (A01/2) u <= b01 - A01.1/2.
    Membership is preserved pointwise.
    """
    A01 = np.asarray(A01, dtype=np.float64)
    b01 = np.asarray(b01, dtype=np.float64)
    if A01.ndim != 2:
        raise ValueError("A01 must be a matrix")
    return Polytope(A01 / 2.0, b01 - A01.sum(axis=1) / 2.0)
