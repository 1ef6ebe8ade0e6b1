"""Bucketed generators for the Boolean cube and their parameter derivation.

Two generators are implemented, both deterministic functions of an explicit
seed bit stream:

* The base bucketed generator: an r_hash-wise uniform hash h : [n] -> [L]
  partitions the coordinates into L buckets, and independently across
  buckets the coordinates of bucket l are filled from an r_bucket-wise
  uniform string y^l.

* The extended generator: each bucket is additionally XOR-ed with an
  independent draw from a CNF-fooling distribution (pluggable; the default
  is an r_cnf-wise uniform string), and the whole n-bit result is XOR-ed
  with an independent 2k-wise uniform string y*.  On +-1 strings XOR is
  componentwise multiplication (0 <-> +1, 1 <-> -1).

The final XOR makes every output of the extended generator exactly 2k-wise
uniform over the full seed space, which is the property the standardization
machinery consumes.

Seed layout (segments consumed in order, bit lengths per the field degrees
chosen in `algebra`):

    [ hash | bucket_1 .. bucket_L | cnf_1 .. cnf_L | global ]

Parameter derivation follows fixed formulas in log base 2 (the base is a
convention; it matches bit accounting), with all hidden constants surfaced
as configuration (c1, c2, c_beta, d).  Theory-mode values are astronomically
large at desk scale, so every parameter can also be set directly ("lab
mode") while keeping the exact generator structure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from .algebra import (
    HashSpec,
    KWiseSpec,
    SeedStream,
    hash_buckets,
    kwise_bits,
    min_field_degree,
)


class UnsupportedFoolerError(Exception):
    """Raised when a CNF-fooler backend other than the default is requested."""


class _UseParams:
    """Sentinel: take the CNF fooler from the params (None disables it)."""

    def __repr__(self):  # pragma: no cover
        return "USE_PARAMS"


USE_PARAMS = _UseParams()


@dataclass(frozen=True)
class CnfFoolerSpec:
    """Plug-in slot for the per-bucket CNF-fooling distribution.

    kind "bounded_independence" draws an r_cnf-wise uniform +-1 string;
    kind "external" is reserved for a faithful small-width-CNF generator
    and is not implemented.
    """

    kind: str = "bounded_independence"
    r_cnf: int = 2
    width: int | None = None
    delta_cnf: float | None = None

    def __post_init__(self):
        if self.kind not in ("bounded_independence", "external"):
            raise ValueError(f"unknown CNF fooler kind {self.kind!r}")
        if self.kind == "bounded_independence" and self.r_cnf < 1:
            raise ValueError("r_cnf must be >= 1")

    def seed_bits(self, n: int) -> int:
        if self.kind != "bounded_independence":
            raise UnsupportedFoolerError(
                "only the bounded_independence CNF fooler is implemented"
            )
        return self.r_cnf * min_field_degree(n)


def cnf_fooler_draw(spec: CnfFoolerSpec, seed: SeedStream, n: int) -> np.ndarray:
    """One draw from the CNF fooler: a +-1 string of length n."""
    if spec.kind != "bounded_independence":
        raise UnsupportedFoolerError(
            "only the bounded_independence CNF fooler is implemented"
        )
    return kwise_bits(KWiseSpec(n=n, k=spec.r_cnf, s=min_field_degree(n)), seed)


@dataclass(frozen=True)
class GeneratorParams:
    """Full parameter tuple; every field explicit, nothing recomputed on load."""

    n: int
    m: int
    delta: float
    eps: float
    lam: float
    tau: float
    d: int
    L: int
    r_hash: int
    r_bucket: int
    k: int
    w: int
    delta_cnf: float
    c1: float = 1.0
    c2: float = 1.0
    c_beta: float = 1.0
    trivial_regime: bool = False
    cnf: CnfFoolerSpec | None = field(default=None)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be >= 1")
        if self.L < 1 or self.L & (self.L - 1):
            raise ValueError("L must be a power of two")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.w < 1:
            raise ValueError("w must be >= 1")
        if self.r_bucket < 2:
            raise ValueError("r_bucket must be >= 2")
        if self.d < 2:
            raise ValueError("d must be >= 2")

    # -- field degrees used by the seed layout ---------------------------
    @property
    def s_bits(self) -> int:
        return min_field_degree(self.n)

    @property
    def s_hash(self) -> int:
        return min_field_degree(max(self.n, self.L))

    def hash_spec(self) -> HashSpec:
        return HashSpec(n=self.n, L=self.L, r=self.r_hash, s=self.s_hash)

    def bucket_spec(self) -> KWiseSpec:
        return KWiseSpec(n=self.n, k=self.r_bucket, s=self.s_bits)

    def global_spec(self) -> KWiseSpec:
        return KWiseSpec(n=self.n, k=2 * self.k, s=self.s_bits)

    # -- serialization ----------------------------------------------------
    def to_json(self) -> str:
        doc = asdict(self)
        doc["cnf"] = asdict(self.cnf) if self.cnf is not None else None
        return json.dumps(doc, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorParams":
        doc = json.loads(text)
        cnf = doc.pop("cnf", None)
        if cnf is not None:
            cnf = CnfFoolerSpec(**cnf)
        return cls(cnf=cnf, **doc)


def derive_params(
    n: int,
    m: int,
    delta: float,
    eps: float,
    *,
    c1: float = 1.0,
    c2: float = 1.0,
    c_beta: float = 1.0,
    d: int = 3,
) -> GeneratorParams:
    """Derive the full parameter tuple from (n, m, delta, eps).

    All logs are base 2.  Integer parameters are rounded up (ceilings; L up
    to a power of two).  If the head budget k exceeds n/2 the result is
    flagged trivial_regime instead of raising: at that point the seed
    length exceeds n and plain enumeration is preferable.
    """
    if not 0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    if m < 2 or n < 2:
        raise ValueError("need m >= 2 and n >= 2")

    log2 = math.log2
    lam = delta / math.sqrt(log2(m / delta) * log2(m))
    tau = delta ** (1 + eps) / log2(m) ** (2.5 + eps)
    L_target = max(1, math.ceil(log2(m) ** 5 / delta ** (2 + eps)))
    L = 1 << (L_target - 1).bit_length()
    r_hash = max(1, math.ceil(c1 * log2(L * m / delta)))
    r_bucket = max(2, math.ceil(log2(m / delta)))
    k_raw = c2 * log2(m / delta) * log2(log2(m / delta)) / tau**2
    k = max(1, math.ceil(k_raw))
    w = max(1, math.ceil(2 * k / L))
    delta_cnf = (delta / L) * (lam / (m * math.sqrt(n))) ** (d - 1)
    trivial = k > n / 2

    r_cnf = min(n, max(1, w * math.ceil(log2(w / delta_cnf))))
    cnf = CnfFoolerSpec(
        kind="bounded_independence", r_cnf=r_cnf, width=w, delta_cnf=delta_cnf
    )
    return GeneratorParams(
        n=n,
        m=m,
        delta=delta,
        eps=eps,
        lam=lam,
        tau=tau,
        d=d,
        L=L,
        r_hash=r_hash,
        r_bucket=r_bucket,
        k=k,
        w=w,
        delta_cnf=delta_cnf,
        c1=c1,
        c2=c2,
        c_beta=c_beta,
        trivial_regime=trivial,
        cnf=cnf,
    )


@dataclass(frozen=True)
class SeedSegment:
    name: str
    offset: int
    nbits: int


@dataclass(frozen=True)
class SeedLayout:
    """Ordered seed segments; total bits equal the reported seed length."""

    segments: tuple[SeedSegment, ...]

    @property
    def total_bits(self) -> int:
        return sum(seg.nbits for seg in self.segments)

    def segment(self, name: str) -> SeedSegment:
        for seg in self.segments:
            if seg.name == name:
                return seg
        raise KeyError(name)


def seed_layout(
    params: GeneratorParams,
    mode: str = "full",
    cnf: CnfFoolerSpec | None | _UseParams = USE_PARAMS,
) -> SeedLayout:
    """Bit-exact seed layout for the given mode.

    mode "mz"   : [hash | bucket_1 .. bucket_L]
    mode "full" : [hash | bucket_1 .. bucket_L | cnf_1 .. cnf_L | global];
                  passing cnf=None disables the fooler and omits the cnf
                  segments (diagnostic MZ-plus-global mode).
    """
    if mode not in ("mz", "full"):
        raise ValueError(f"unknown layout mode {mode!r}")
    if cnf is USE_PARAMS:
        cnf = params.cnf
    segs: list[SeedSegment] = []
    pos = 0

    def push(name: str, nbits: int):
        nonlocal pos
        segs.append(SeedSegment(name, pos, nbits))
        pos += nbits

    push("hash", params.hash_spec().seed_bits)
    for ell in range(params.L):
        push(f"bucket_{ell}", params.bucket_spec().seed_bits)
    if mode == "full":
        if cnf is not None:
            nbits = cnf.seed_bits(params.n)
            for ell in range(params.L):
                push(f"cnf_{ell}", nbits)
        push("global", params.global_spec().seed_bits)
    return SeedLayout(tuple(segs))


def seed_length(
    params: GeneratorParams,
    mode: str = "full",
    cnf: CnfFoolerSpec | None | _UseParams = USE_PARAMS,
) -> tuple[int, SeedLayout]:
    """Seed length in bits, together with the layout it was summed from."""
    layout = seed_layout(params, mode=mode, cnf=cnf)
    return layout.total_bits, layout


def mz_generate(params: GeneratorParams, seed: SeedStream) -> np.ndarray:
    """One draw from the base bucketed generator (hash + bucket segments only).

    Output z satisfies z restricted to h^-1(l) equals y^l restricted to
    h^-1(l) for every bucket l.  The seed must carry exactly the layout's
    bit count (underflow and overflow both raise).
    """
    buckets = hash_buckets(params.hash_spec(), seed)
    spec = params.bucket_spec()
    ys = [kwise_bits(spec, seed) for _ in range(params.L)]
    if seed.bits_remaining:
        raise ValueError(
            f"seed overflow: {seed.bits_remaining} unread bits beyond the MZ layout"
        )
    z = np.empty(params.n, dtype=np.int8)
    for j in range(params.n):
        z[j] = ys[buckets[j]][j]
    return z


def our_generate(
    params: GeneratorParams,
    seed: SeedStream,
    cnf: CnfFoolerSpec | None | _UseParams = USE_PARAMS,
) -> np.ndarray:
    """One draw from the extended generator.

    z = ybreve XOR ystar, where ybreve on bucket l is (y^l XOR ytilde^l)
    restricted to h^-1(l), ytilde^l is a CNF-fooler draw, and ystar is the
    2k-wise uniform string.  XOR on +-1 strings is componentwise product.

    Passing cnf=None disables the fooler and skips its seed segments
    (diagnostic mode: base generator XOR ystar only); the 2k-wise
    uniformity of the output is unaffected.
    """
    if cnf is USE_PARAMS:
        cnf = params.cnf
    buckets = hash_buckets(params.hash_spec(), seed)
    spec = params.bucket_spec()
    ys = [kwise_bits(spec, seed) for _ in range(params.L)]
    if cnf is not None:
        ytildes = [cnf_fooler_draw(cnf, seed, params.n) for _ in range(params.L)]
    else:
        ytildes = None
    ystar = kwise_bits(params.global_spec(), seed)
    if seed.bits_remaining:
        raise ValueError(
            f"seed overflow: {seed.bits_remaining} unread bits beyond the layout"
        )

    z = np.empty(params.n, dtype=np.int8)
    for j in range(params.n):
        ell = buckets[j]
        v = ys[ell][j]
        if ytildes is not None:
            v *= ytildes[ell][j]
        z[j] = v * ystar[j]
    return z
