"""Brute-force oracles and experiments over small cubes and seed spaces.

Everything here is exact enumeration: cube probabilities are integer
counts over all 2^n points, generator probabilities are integer counts
over all (or a counter-prefix of) seed values, and every bound check
compares those exact quantities against closed-form expressions.

Enumeration caps keep runs at desk scale: cubes up to n = 24, seed spaces
up to 2^26, edge censuses up to n = 20.  Cube enumeration uses Gray-code
order with incremental dot updates for integer weight matrices (exact in
int64); seed enumeration exploits the generator's GF(2)-linear structure
per hash segment (probed from, and verified against, the reference
generator).  Ranges may be split arbitrarily; counts are integers, so
results are independent of the split.

Counter-to-seed convention: counter value c is the seed whose bit string
is the total_bits-wide big-endian representation of c.  "all_seeds" is
counters 0 .. 2^total_bits - 1; "strided" sampling is the counter prefix
0 .. N-1 (deterministic and reproducible; unbiased only in the full-space
limit, which reports state alongside the count used).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import kernels
from .algebra import KWiseSpec, SeedStream, hash_buckets, kwise_bits
from .generators import USE_PARAMS, GeneratorParams, our_generate, seed_length
from .mollifier import MollifierSpec, approximators
from .polytope import Polytope

CUBE_ENUM_CAP = 24
SEED_ENUM_CAP_BITS = 26
EDGE_ENUM_CAP = 20

LO_CONSTANT = 5.0 * math.sqrt(2.0)


class EnumerationCapError(Exception):
    """Raised when an experiment exceeds the desk-scale enumeration caps."""


# ---------------------------------------------------------------------------
# Report records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LabReport:
    """One enumeration experiment.  Derived quantities are properties."""

    experiment: str
    description: str
    exact_probability: float | None = None
    generator_probability: float | None = None
    bound_value: float | None = None
    runtime_seconds: float = 0.0
    seed_space_size: int | None = None
    note: str = ""

    CSV_HEADER = (
        "experiment,description,exact_probability,generator_probability,"
        "discrepancy,bound_value,bound_satisfied,runtime_seconds,"
        "seed_space_size,note"
    )

    @property
    def discrepancy(self) -> float | None:
        if self.exact_probability is None or self.generator_probability is None:
            return None
        return abs(self.exact_probability - self.generator_probability)

    @property
    def bound_satisfied(self) -> bool | None:
        if self.bound_value is None:
            return None
        value = self.discrepancy
        if value is None:
            value = self.exact_probability
        return value <= self.bound_value

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "description": self.description,
            "exact_probability": self.exact_probability,
            "generator_probability": self.generator_probability,
            "discrepancy": self.discrepancy,
            "bound_value": self.bound_value,
            "bound_satisfied": self.bound_satisfied,
            "runtime_seconds": self.runtime_seconds,
            "seed_space_size": self.seed_space_size,
            "note": self.note,
        }

    def to_csv_row(self) -> str:
        def fmt(x):
            if x is None:
                return ""
            if isinstance(x, float):
                return format(x, ".17g")
            return str(x)

        d = self.to_json_dict()
        fields = [
            d["experiment"],
            d["description"].replace(",", ";"),
            fmt(d["exact_probability"]),
            fmt(d["generator_probability"]),
            fmt(d["discrepancy"]),
            fmt(d["bound_value"]),
            fmt(d["bound_satisfied"]),
            fmt(d["runtime_seconds"]),
            fmt(d["seed_space_size"]),
            d["note"].replace(",", ";"),
        ]
        return ",".join(fields)


# ---------------------------------------------------------------------------
# Exact cube enumeration
# ---------------------------------------------------------------------------


def _check_cube_cap(n: int, cap: int = CUBE_ENUM_CAP):
    if n > cap:
        raise EnumerationCapError(f"n={n} exceeds the enumeration cap {cap}")


def exact_orthant_count(p: Polytope) -> int:
    """Number of cube points inside the polytope, by exact enumeration."""
    _check_cube_cap(p.n)
    counts = kernels.cube_orthant_counts(p.A, p.b[None, :], 0, 1 << p.n)
    return int(counts[0])


def exact_orthant_prob(p: Polytope) -> float:
    """Exact satisfying fraction count / 2^n (a dyadic rational)."""
    return exact_orthant_count(p) / float(1 << p.n)


def _strip_counts(p: Polytope, inner_width: float, outer_width: float = 0.0):
    """Counts of O_{b-inner}, O_b, O_{b+outer} in one cube pass."""
    th = np.stack([p.b - inner_width, p.b, p.b + outer_width])
    counts = kernels.cube_orthant_counts(p.A, th, 0, 1 << p.n)
    return int(counts[0]), int(counts[1]), int(counts[2])


# ---------------------------------------------------------------------------
# Seed-space enumeration via the generator's linear structure
# ---------------------------------------------------------------------------


class SeedBudgetError(Exception):
    pass


class _LinearSeedModel:
    """Per-hash-seed linear model of the extended generator.

    For a fixed hash segment value the map (remaining seed bits) -> (output
    sign pattern) is GF(2)-linear, because every segment evaluates a
    polynomial whose value bits are GF(2)-linear in the coefficient bits,
    and the XOR composition preserves linearity.  The model is probed from
    the reference generator (base pattern + one mask per seed bit) and
    re-verified on fixed probe patterns; any mismatch raises.
    """

    def __init__(self, params: GeneratorParams, cnf=USE_PARAMS):
        self.params = params
        self.cnf = params.cnf if cnf is USE_PARAMS else cnf
        total, layout = seed_length(params, mode="full", cnf=self.cnf)
        self.total_bits = total
        self.hash_bits = layout.segment("hash").nbits
        self.rest_bits = total - self.hash_bits
        self._memo: dict[int, tuple[int, np.ndarray]] = {}

    def output_bits(self, counter: int) -> int:
        seed = SeedStream.from_int(counter, self.total_bits)
        u = our_generate(self.params, seed, cnf=self.cnf)
        if seed.bits_remaining:
            raise AssertionError("generator did not consume its declared seed length")
        bits = 0
        for j in range(self.params.n):
            if u[j] == 1:
                bits |= 1 << j
        return bits

    def _probe_patterns(self) -> list[int]:
        rb = self.rest_bits
        full = (1 << rb) - 1
        pats = {full, full & 0x5555555555555555, full & 0x3333333333333333}
        pats.discard(0)
        return sorted(pats)

    def model_for_hash(self, hs: int) -> tuple[int, np.ndarray]:
        if hs in self._memo:
            return self._memo[hs]
        origin = hs << self.rest_bits
        base = self.output_bits(origin)
        masks = np.empty(self.rest_bits, dtype=np.int64)
        for t in range(self.rest_bits):
            masks[t] = self.output_bits(origin | (1 << t)) ^ base
        for r in self._probe_patterns():
            folded = base
            rr, t = r, 0
            while rr:
                if rr & 1:
                    folded ^= int(masks[t])
                rr >>= 1
                t += 1
            if folded != self.output_bits(origin | r):
                raise AssertionError(
                    "probed linear seed model disagrees with the generator"
                )
        self._memo[hs] = (base, masks)
        return base, masks


@lru_cache(maxsize=32)
def _get_model(params: GeneratorParams, cnf) -> _LinearSeedModel:
    return _LinearSeedModel(params, cnf)


@dataclass(frozen=True)
class GenProbResult:
    probability: float
    count: int
    seeds_used: int
    seed_bits: int
    mode: str


def _seed_range_counts(
    model: _LinearSeedModel, A: np.ndarray, thresholds: np.ndarray, n_seeds: int
) -> np.ndarray:
    """Counts over counters [0, n_seeds) for each threshold row."""
    total = np.zeros(thresholds.shape[0], dtype=np.int64)
    block = 1 << model.rest_bits
    for hs in range(1 << model.hash_bits):
        lo_global = hs * block
        if lo_global >= n_seeds:
            break
        hi = min(block, n_seeds - lo_global)
        base, masks = model.model_for_hash(hs)
        total += kernels.linear_seed_orthant_counts(base, masks, A, thresholds, 0, hi)
    return total


def generator_orthant_prob(
    p: Polytope,
    params: GeneratorParams,
    mode: str = "all_seeds",
    sample_count: int | None = None,
    cnf=USE_PARAMS,
) -> GenProbResult:
    """Fraction of seeds whose generator output lands inside the polytope.

    mode "all_seeds" enumerates the full seed space (requires seed length
    <= 26 bits); mode "strided" uses the deterministic counter prefix
    0 .. sample_count-1.
    """
    if p.n != params.n:
        raise ValueError(f"polytope has n={p.n} but params have n={params.n}")
    model = _get_model(params, params.cnf if cnf is USE_PARAMS else cnf)
    total_bits = model.total_bits
    if mode == "all_seeds":
        if total_bits > SEED_ENUM_CAP_BITS:
            raise SeedBudgetError(
                f"seed length {total_bits} bits exceeds the all_seeds cap of "
                f"{SEED_ENUM_CAP_BITS} bits; use strided sampling or smaller "
                f"lab-mode parameters"
            )
        n_seeds = 1 << total_bits
    elif mode == "strided":
        if not sample_count or sample_count < 1:
            raise ValueError("strided mode needs a positive sample_count")
        n_seeds = min(sample_count, 1 << total_bits)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    counts = _seed_range_counts(model, p.A, p.b[None, :], n_seeds)
    return GenProbResult(
        probability=int(counts[0]) / n_seeds,
        count=int(counts[0]),
        seeds_used=n_seeds,
        seed_bits=total_bits,
        mode=mode,
    )


def discrepancy(
    p: Polytope,
    params: GeneratorParams,
    mode: str = "all_seeds",
    sample_count: int | None = None,
    cnf=USE_PARAMS,
    description: str = "",
) -> LabReport:
    """|exact cube probability - generator probability| for one instance."""
    t0 = time.perf_counter()
    exact = exact_orthant_prob(p)
    gen = generator_orthant_prob(p, params, mode, sample_count, cnf)
    return LabReport(
        experiment="discrepancy",
        description=description or f"m={p.m} n={p.n}",
        exact_probability=exact,
        generator_probability=gen.probability,
        runtime_seconds=time.perf_counter() - t0,
        seed_space_size=gen.seeds_used,
    )


# ---------------------------------------------------------------------------
# Exact parity bias of the generator over the full seed space
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def _family_outputs(spec: KWiseSpec) -> np.ndarray:
    """All outputs of a k-wise family, one row per seed (2^(k*s) x n, int8)."""
    if spec.seed_bits > 22:
        raise EnumerationCapError(
            f"family enumeration needs {spec.seed_bits} seed bits (> 22)"
        )
    rows = 1 << spec.seed_bits
    out = np.empty((rows, spec.n), dtype=np.int8)
    for c in range(rows):
        out[c] = kwise_bits(spec, SeedStream.from_int(c, spec.seed_bits))
    return out


def _family_parity_sum(spec: KWiseSpec, subset: tuple[int, ...]) -> int:
    """Sum over all seeds of the +-1 parity prod_{j in subset} u_j."""
    fam = _family_outputs(spec)
    if not subset:
        return fam.shape[0]
    neg = (fam[:, list(subset)] == -1).sum(axis=1) & 1
    return int(fam.shape[0] - 2 * int(neg.sum()))


def generator_parity_bias(
    params: GeneratorParams, subset, cnf=USE_PARAMS
) -> Fraction:
    """Exact E[prod_{j in subset} z_j] over the generator's full seed space.

    Computed through the seed layout's independence structure: the parity
    factorizes across buckets and across the XOR-ed segments, so the
    expectation is a product of per-segment parity sums averaged over the
    hash segment.  The result is an exact rational.
    """
    subset = tuple(sorted(set(int(j) for j in subset)))
    if any(j < 0 or j >= params.n for j in subset):
        raise ValueError("subset indices out of range")
    cnf = params.cnf if cnf is USE_PARAMS else cnf
    hash_spec = params.hash_spec()
    if hash_spec.seed_bits > 22:
        raise EnumerationCapError("hash segment too large to enumerate")
    bucket_spec = params.bucket_spec()
    global_spec = params.global_spec()
    cnf_spec = (
        KWiseSpec(n=params.n, k=cnf.r_cnf, s=params.s_bits) if cnf is not None else None
    )

    global_sum = _family_parity_sum(global_spec, subset)
    hash_num = 0
    for hs in range(1 << hash_spec.seed_bits):
        buckets = hash_buckets(
            hash_spec, SeedStream.from_int(hs, hash_spec.seed_bits)
        )
        prod = 1
        for ell in range(params.L):
            sub_ell = tuple(j for j in subset if buckets[j] == ell)
            prod *= _family_parity_sum(bucket_spec, sub_ell)
            if cnf_spec is not None:
                prod *= _family_parity_sum(cnf_spec, sub_ell)
        hash_num += prod

    bucket_den = 1 << bucket_spec.seed_bits
    cnf_den = (1 << cnf_spec.seed_bits) if cnf_spec is not None else 1
    denom = (
        (1 << hash_spec.seed_bits)
        * (bucket_den * cnf_den) ** params.L
        * (1 << global_spec.seed_bits)
    )
    return Fraction(hash_num * global_sum, denom)


def h_good_fraction(params: GeneratorParams, head_supports) -> Fraction:
    """Exact fraction of hash seeds that are H-good for the given heads.

    A hash h is H-good when every row's head support receives at most
    params.w coordinates in every bucket.  head_supports is an iterable of
    per-row index collections (e.g. the heads of a standardized polytope).
    Computed by enumerating the full hash-seed space.
    """
    heads = [np.asarray(sorted(set(int(j) for j in h)), dtype=np.int64)
             for h in head_supports]
    for h in heads:
        if h.size and (h[0] < 0 or h[-1] >= params.n):
            raise ValueError("head indices out of range")
    hash_spec = params.hash_spec()
    if hash_spec.seed_bits > 22:
        raise EnumerationCapError("hash segment too large to enumerate")
    good = 0
    total = 1 << hash_spec.seed_bits
    for hs in range(total):
        buckets = hash_buckets(hash_spec, SeedStream.from_int(hs, hash_spec.seed_bits))
        ok = True
        for h in heads:
            if h.size == 0:
                continue
            counts = np.bincount(buckets[h], minlength=params.L)
            if counts.max() > params.w:
                ok = False
                break
        if ok:
            good += 1
    return Fraction(good, total)


# ---------------------------------------------------------------------------
# Littlewood-Offord style boundary experiments
# ---------------------------------------------------------------------------


def lo_boundary_fraction(p: Polytope, width: float, description: str = "") -> LabReport:
    """Exact fraction of cube points in the inner width-strip of the polytope.

    width = 0 counts the exact surface (points with A_i.u = b_i for some i)
    and is only offered for integer weights and thresholds.  The closed-form
    bound 5*sqrt(2)*sqrt(ln m)/sqrt(n) is attached when its hypotheses hold
    (|A_ij| >= 1 everywhere, m >= 2, width <= 2); otherwise it is skipped
    with a note.
    """
    _check_cube_cap(p.n)
    t0 = time.perf_counter()
    if width < 0:
        raise ValueError("width must be >= 0")
    if width == 0:
        if not (
            np.array_equal(p.A, np.rint(p.A)) and np.array_equal(p.b, np.rint(p.b))
        ):
            raise ValueError("surface counting (width=0) needs integer A and b")
        inner, outer, _ = _strip_counts(p, 1.0)
    else:
        inner, outer, _ = _strip_counts(p, width)
    count = outer - inner
    fraction = count / float(1 << p.n)

    note = ""
    bound = None
    if p.m >= 2 and np.abs(p.A).min() >= 1.0 and width <= 2.0:
        bound = LO_CONSTANT * math.sqrt(math.log(p.m)) / math.sqrt(p.n)
    else:
        note = "bound skipped: needs |A_ij| >= 1, m >= 2, width <= 2"
    return LabReport(
        experiment="lo_boundary",
        description=description or f"m={p.m} n={p.n} width={width}",
        exact_probability=fraction,
        bound_value=bound,
        runtime_seconds=time.perf_counter() - t0,
        note=note,
    )


def lo_threshold_level(n: int, m: int) -> int:
    """Largest k with sum_{j<k} C(n,j) <= (1 - 1/m) * 2^n."""
    budget = (1 - Fraction(1, m)) * (1 << n)
    acc = 0
    k = 0
    for j in range(n + 1):
        if acc + math.comb(n, j) > budget:
            break
        acc += math.comb(n, j)
        k = j + 1
    return k


@dataclass(frozen=True)
class LOSearchResult:
    best_A: np.ndarray
    best_b: np.ndarray
    best_fraction: float
    best_trial: int  # -1 marks the canonical fallback instance
    ratio: float  # best_fraction / (sqrt(ln m) / sqrt(n))
    level_k: int
    trials: int

    def to_json_dict(self) -> dict:
        return {
            "best_A": self.best_A.tolist(),
            "best_b": self.best_b.tolist(),
            "best_fraction": self.best_fraction,
            "best_trial": self.best_trial,
            "ratio": self.ratio,
            "level_k": self.level_k,
            "trials": self.trials,
        }


def _surface_fraction(p: Polytope) -> float:
    inner, outer, _ = _strip_counts(p, 1.0)
    return (outer - inner) / float(1 << p.n)


def lo_lowerbound_search(
    n: int, m: int, trials: int, rng_seed: int
) -> LOSearchResult:
    """Search for polytopes with heavy exact surface mass.

    Each trial draws a +-1 matrix from a seeded RNG and sets every
    threshold to 2k - n, where k is the largest integer with
    C(n, <k)/2^n <= 1 - 1/m; the exact surface fraction is measured by
    enumeration.  For m < 10 (or m outside 2 <= m <= 2^(n/10)) the
    canonical fallback also enters the comparison: the all-ones matrix
    with threshold 0 (threshold 1 for odd n, where level 0 is empty).
    The maximum over everything examined is returned; this is a search,
    not a certified extremum.
    """
    _check_cube_cap(n)
    if m < 2:
        raise ValueError("need m >= 2")
    k = lo_threshold_level(n, m)
    level = 2 * k - n
    rng = np.random.default_rng(rng_seed)

    best_fraction = -1.0
    best = None
    best_trial = None
    if m < 10 or m > 2 ** (n / 10):
        A = np.ones((m, n))
        b = np.full(m, float(n % 2))
        frac = _surface_fraction(Polytope(A, b))
        best_fraction, best, best_trial = frac, (A, b), -1
    for t in range(trials):
        A = rng.integers(0, 2, size=(m, n)).astype(np.float64) * 2 - 1
        b = np.full(m, float(level))
        frac = _surface_fraction(Polytope(A, b))
        if frac > best_fraction:
            best_fraction, best, best_trial = frac, (A, b), t
    ratio = best_fraction / (math.sqrt(math.log(m)) / math.sqrt(n))
    return LOSearchResult(
        best_A=best[0],
        best_b=best[1],
        best_fraction=best_fraction,
        best_trial=best_trial,
        ratio=ratio,
        level_k=k,
        trials=trials,
    )


# ---------------------------------------------------------------------------
# Edge censuses: caps, directed boundaries, average sensitivity
# ---------------------------------------------------------------------------


def _membership_tables(p: Polytope) -> np.ndarray:
    """Per-halfspace membership over the whole cube: bool (m, 2^n)."""
    _check_cube_cap(p.n, EDGE_ENUM_CAP)
    n = p.n
    size = 1 << n
    tables = np.empty((p.m, size), dtype=bool)
    block = 1 << 14
    cols = np.arange(n, dtype=np.int64)
    for start in range(0, size, block):
        stop = min(start + block, size)
        idx = np.arange(start, stop, dtype=np.int64)
        signs = ((idx[:, None] >> cols[None, :]) & 1) * 2.0 - 1.0
        dots = signs @ p.A.T
        tables[:, start:stop] = (dots <= p.b[None, :]).T
    return tables


def _boundary_edge_count(table: np.ndarray, n: int) -> int:
    total = 0
    for j in range(n):
        r = table.reshape(-1, 2, 1 << j)
        total += int((r[:, 0, :] != r[:, 1, :]).sum())
    return total


@dataclass(frozen=True)
class EdgeCensus:
    """Boundary-edge census of one cap C_i = (H_1 cap .. cap H_{i-1}) \\ H_i.

    Edge orientation follows the i-th halfspace: arrows point away from it,
    so H_i is antimonotone along arrows and Cap->Body edges cannot exist
    (they are asserted to be zero, never counted).  Counts are exact
    integers out of the n * 2^(n-1) cube edges.
    """

    cap_index: int
    bc: int
    ec: int
    ce: int
    cap_points: int
    n: int
    prefix_boundary_before: int
    prefix_boundary_after: int

    @property
    def total_edges(self) -> int:
        return self.n * (1 << (self.n - 1))

    @property
    def boundary_count(self) -> int:
        return self.bc + self.ec + self.ce

    @property
    def directed_count(self) -> int:
        return self.bc + self.ec - self.ce

    @property
    def directed_fraction(self) -> float:
        return self.directed_count / self.total_edges

    @property
    def cap_volume(self) -> float:
        return self.cap_points / float(1 << self.n)

    @property
    def change_identity_holds(self) -> bool:
        # E(G cap H) - E(G) = BC - EC - CE, in exact edge counts.
        return (
            self.prefix_boundary_after - self.prefix_boundary_before
            == self.bc - self.ec - self.ce
        )

    @property
    def directed_bound(self) -> float:
        p = self.cap_volume
        if p <= 0.0:
            return 0.0
        return 2.0 * p * math.sqrt(2.0 * math.log(1.0 / p)) / math.sqrt(self.n)

    @property
    def directed_bound_holds(self) -> bool:
        return self.directed_fraction <= self.directed_bound

    def to_json_dict(self) -> dict:
        return {
            "cap_index": self.cap_index,
            "bc": self.bc,
            "ec": self.ec,
            "ce": self.ce,
            "cap_points": self.cap_points,
            "n": self.n,
            "total_edges": self.total_edges,
            "boundary_count": self.boundary_count,
            "directed_count": self.directed_count,
            "directed_fraction": self.directed_fraction,
            "cap_volume": self.cap_volume,
            "change_identity_holds": self.change_identity_holds,
            "directed_bound": self.directed_bound,
            "directed_bound_holds": self.directed_bound_holds,
        }


def cap_edge_census(
    p: Polytope, orientations: np.ndarray | None = None
) -> list[EdgeCensus]:
    """Census of the staged caps of the intersection, one per halfspace.

    Orientations default to -sign(A_ij) per halfspace (+1 where the weight
    is zero); explicit +-1 orientation vectors may be supplied for unate
    members given in another form.  A supplied orientation under which a
    Cap->Body edge appears is rejected, since the census relies on the
    halfspace being antimonotone along the oriented edges.
    """
    _check_cube_cap(p.n, EDGE_ENUM_CAP)
    n, m = p.n, p.m
    if orientations is None:
        orientations = np.where(p.A > 0, -1, 1).astype(np.int64)
    else:
        orientations = np.asarray(orientations, dtype=np.int64)
        if orientations.shape != (m, n) or not np.isin(orientations, (-1, 1)).all():
            raise ValueError("orientations must be a +-1 matrix of shape (m, n)")

    tables = _membership_tables(p)
    out: list[EdgeCensus] = []
    G = np.ones(1 << n, dtype=bool)
    e_before = 0  # E(full cube) = 0
    for i in range(m):
        H = tables[i]
        body = G & H
        cap = G & ~H
        ext = ~G
        bc = ec = ce = cb = 0
        for j in range(n):
            shape = (-1, 2, 1 << j)
            # tail endpoint has u_j = sigma_j; bit j set <-> u_j = +1
            t = 1 if orientations[i, j] == 1 else 0
            h = 1 - t
            b3 = body.reshape(shape)
            c3 = cap.reshape(shape)
            e3 = ext.reshape(shape)
            bc += int((b3[:, t, :] & c3[:, h, :]).sum())
            ec += int((e3[:, t, :] & c3[:, h, :]).sum())
            ce += int((c3[:, t, :] & e3[:, h, :]).sum())
            cb += int((c3[:, t, :] & b3[:, h, :]).sum())
        if cb:
            raise ValueError(
                f"cap {i + 1} has {cb} Cap->Body edges; the supplied orientation "
                "does not make the halfspace antimonotone"
            )
        e_after = _boundary_edge_count(body, n)
        out.append(
            EdgeCensus(
                cap_index=i + 1,
                bc=bc,
                ec=ec,
                ce=ce,
                cap_points=int(cap.sum()),
                n=n,
                prefix_boundary_before=e_before,
                prefix_boundary_after=e_after,
            )
        )
        G = body
        e_before = e_after
    return out


def average_sensitivity(p: Polytope, description: str = "") -> LabReport:
    """Exact boundary-edge fraction of the intersection, with the 2*sqrt(2 ln m)/sqrt(n) bound."""
    _check_cube_cap(p.n, EDGE_ENUM_CAP)
    t0 = time.perf_counter()
    tables = _membership_tables(p)
    F = np.logical_and.reduce(tables, axis=0)
    count = _boundary_edge_count(F, p.n)
    fraction = count / (p.n * (1 << (p.n - 1)))
    bound = None
    note = ""
    if p.m >= 2:
        bound = 2.0 * math.sqrt(2.0 * math.log(p.m)) / math.sqrt(p.n)
    else:
        note = "bound skipped: needs m >= 2"
    return LabReport(
        experiment="average_sensitivity",
        description=description or f"m={p.m} n={p.n}",
        exact_probability=fraction,
        bound_value=bound,
        runtime_seconds=time.perf_counter() - t0,
        note=note,
    )


@dataclass(frozen=True)
class BoundaryProfile:
    """Edge classes around the width-strip boundary of an intersection.

    nu_bi / nu_be / nu_bb_prime are the fractions of cube edges from the
    strip to the interior, to the exterior, and between strip points whose
    first violated halfspace differs; same_star_edges counts strip-strip
    edges with the same first violated halfspace (zero when every
    per-halfspace strip is thin).
    """

    strip_points: int
    n: int
    bi_edges: int
    be_edges: int
    bb_prime_edges: int
    same_star_edges: int

    @property
    def total_edges(self) -> int:
        return self.n * (1 << (self.n - 1))

    @property
    def nu_bi(self) -> float:
        return self.bi_edges / self.total_edges

    @property
    def nu_be(self) -> float:
        return self.be_edges / self.total_edges

    @property
    def nu_bb_prime(self) -> float:
        return self.bb_prime_edges / self.total_edges

    @property
    def strip_fraction(self) -> float:
        return self.strip_points / float(1 << self.n)

    def to_json_dict(self) -> dict:
        return {
            "strip_points": self.strip_points,
            "n": self.n,
            "bi_edges": self.bi_edges,
            "be_edges": self.be_edges,
            "bb_prime_edges": self.bb_prime_edges,
            "same_star_edges": self.same_star_edges,
            "nu_bi": self.nu_bi,
            "nu_be": self.nu_be,
            "nu_bb_prime": self.nu_bb_prime,
            "strip_fraction": self.strip_fraction,
        }


def thin_boundary_profile(p: Polytope, width: float) -> BoundaryProfile:
    """Classify every edge touching the inner width-strip of the polytope."""
    _check_cube_cap(p.n, EDGE_ENUM_CAP)
    if width <= 0:
        raise ValueError("width must be > 0")
    n = p.n
    outer_tables = _membership_tables(p)
    inner_tables = _membership_tables(Polytope(p.A, p.b - width))
    F = np.logical_and.reduce(outer_tables, axis=0)
    F_int = np.logical_and.reduce(inner_tables, axis=0)
    strip = F & ~F_int
    ext = ~F
    # first halfspace whose inner copy the point violates
    violated = ~inner_tables
    i_star = np.argmax(violated, axis=0)

    bi = be = bb = same = 0
    for j in range(n):
        shape = (-1, 2, 1 << j)
        s3 = strip.reshape(shape)
        f3 = F_int.reshape(shape)
        e3 = ext.reshape(shape)
        is3 = i_star.reshape(shape)
        s0, s1 = s3[:, 0, :], s3[:, 1, :]
        bi += int((s0 & f3[:, 1, :]).sum() + (s1 & f3[:, 0, :]).sum())
        be += int((s0 & e3[:, 1, :]).sum() + (s1 & e3[:, 0, :]).sum())
        both = s0 & s1
        differs = is3[:, 0, :] != is3[:, 1, :]
        bb += int((both & differs).sum())
        same += int((both & ~differs).sum())
    return BoundaryProfile(
        strip_points=int(strip.sum()),
        n=n,
        bi_edges=bi,
        be_edges=be,
        bb_prime_edges=bb,
        same_star_edges=same,
    )


def semi_thin_fraction(p: Polytope, width: float) -> np.ndarray:
    """Per row, the fraction of entries with |A_ij| >= width/2."""
    return (np.abs(p.A) >= width / 2.0).mean(axis=1)


def semi_thin_check(p: Polytope, width: float, description: str = "") -> LabReport:
    """Measured strip mass vs the robust bound 5*sqrt(2 ln m)/(alpha*sqrt(n)).

    alpha is the smallest per-row fraction of entries with magnitude at
    least width/2; when alpha = 0 or m < 2 the bound is skipped.
    """
    _check_cube_cap(p.n)
    t0 = time.perf_counter()
    alphas = semi_thin_fraction(p, width)
    alpha = float(alphas.min())
    inner, outer, _ = _strip_counts(p, width)
    fraction = (outer - inner) / float(1 << p.n)
    bound = None
    note = f"alpha={alpha}"
    if alpha > 0 and p.m >= 2:
        bound = 5.0 * math.sqrt(2.0 * math.log(p.m)) / (alpha * math.sqrt(p.n))
    else:
        note += "; bound skipped: needs alpha > 0 and m >= 2"
    return LabReport(
        experiment="semi_thin",
        description=description or f"m={p.m} n={p.n} width={width}",
        exact_probability=fraction,
        bound_value=bound,
        runtime_seconds=time.perf_counter() - t0,
        note=note,
    )


# ---------------------------------------------------------------------------
# Mollifier experiments
# ---------------------------------------------------------------------------


def cube_mollifier_mean(p: Polytope, spec: MollifierSpec) -> float:
    _check_cube_cap(p.n)
    total = kernels.cube_mollifier_sum(p.A, spec.b, spec.lam, 0, 1 << p.n)
    return total / float(1 << p.n)


def seed_mollifier_mean(
    p: Polytope,
    params: GeneratorParams,
    spec: MollifierSpec,
    n_seeds: int | None = None,
    cnf=USE_PARAMS,
) -> tuple[float, int]:
    model = _get_model(params, params.cnf if cnf is USE_PARAMS else cnf)
    if n_seeds is None:
        if model.total_bits > SEED_ENUM_CAP_BITS:
            raise SeedBudgetError(
                f"seed length {model.total_bits} bits exceeds the cap"
            )
        n_seeds = 1 << model.total_bits
    total = 0.0
    block = 1 << model.rest_bits
    for hs in range(1 << model.hash_bits):
        lo_global = hs * block
        if lo_global >= n_seeds:
            break
        hi = min(block, n_seeds - lo_global)
        base, masks = model.model_for_hash(hs)
        total += kernels.linear_seed_mollifier_sum(
            base, masks, p.A, spec.b, spec.lam, 0, hi
        )
    return total / n_seeds, n_seeds


def mollifier_discrepancy(
    p: Polytope,
    params: GeneratorParams,
    spec: MollifierSpec,
    cnf=USE_PARAMS,
    description: str = "",
) -> LabReport:
    """Exact cube mean minus exact seed mean of the mollified indicator."""
    t0 = time.perf_counter()
    cube_mean = cube_mollifier_mean(p, spec)
    seed_mean, n_seeds = seed_mollifier_mean(p, params, spec, cnf=cnf)
    return LabReport(
        experiment="mollifier_discrepancy",
        description=description or f"m={p.m} n={p.n} lambda={spec.lam}",
        exact_probability=cube_mean,
        generator_probability=seed_mean,
        runtime_seconds=time.perf_counter() - t0,
        seed_space_size=n_seeds,
    )


# ---------------------------------------------------------------------------
# Soft-to-hard accounting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SoftToHardReport:
    """Measured pieces of the soft-to-hard inequality.

    lhs = |Pr_u[Au in O_b] - Pr_z[Az in O_b]| must not exceed
    rhs = gamma + 2 * delta_slack + boundary_mass, where gamma is the
    measured mollifier discrepancy (worst of the inner/outer shifted
    mollifiers), delta_slack the measured approximator defect outside the
    excluded strips over both supports, and boundary_mass the exact mass
    of the Lambda-boundary under the uniform cube.
    """

    exact_probability: float
    generator_probability: float
    gamma_inner: float
    gamma_outer: float
    delta_slack: float
    boundary_mass: float
    big_lambda: float
    seed_space_size: int

    @property
    def lhs(self) -> float:
        return abs(self.exact_probability - self.generator_probability)

    @property
    def gamma(self) -> float:
        return max(self.gamma_inner, self.gamma_outer)

    @property
    def rhs(self) -> float:
        return self.gamma + 2.0 * self.delta_slack + self.boundary_mass

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    def to_json_dict(self) -> dict:
        return {
            "exact_probability": self.exact_probability,
            "generator_probability": self.generator_probability,
            "gamma_inner": self.gamma_inner,
            "gamma_outer": self.gamma_outer,
            "gamma": self.gamma,
            "delta_slack": self.delta_slack,
            "boundary_mass": self.boundary_mass,
            "big_lambda": self.big_lambda,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "seed_space_size": self.seed_space_size,
        }


def soft_to_hard_check(
    p: Polytope,
    params: GeneratorParams,
    lam: float,
    delta: float,
    c_beta: float = 1.0,
    cnf=USE_PARAMS,
) -> SoftToHardReport:
    """Measure every term of the soft-to-hard inequality on one instance."""
    _check_cube_cap(p.n)
    pair = approximators(p.b, lam, p.m, delta, c_beta)
    model = _get_model(params, params.cnf if cnf is USE_PARAMS else cnf)
    if model.total_bits > SEED_ENUM_CAP_BITS:
        raise SeedBudgetError(f"seed length {model.total_bits} bits exceeds the cap")
    n_seeds = 1 << model.total_bits

    exact = exact_orthant_prob(p)
    gen = generator_orthant_prob(p, params, cnf=cnf)

    spec_in = MollifierSpec(pair.b_in, lam)
    spec_out = MollifierSpec(pair.b_out, lam)
    cube_in = cube_mollifier_mean(p, spec_in)
    cube_out = cube_mollifier_mean(p, spec_out)
    seed_in, _ = seed_mollifier_mean(p, params, spec_in, cnf=cnf)
    seed_out, _ = seed_mollifier_mean(p, params, spec_out, cnf=cnf)

    inner, _, outer_plus = _strip_counts(p, pair.big_lambda, pair.big_lambda)
    mass = (outer_plus - inner) / float(1 << p.n)

    slack = kernels.cube_max_defect(
        p.A, p.b, pair.b_in, pair.b_out, lam, pair.big_lambda, 0, 1 << p.n
    )
    block = 1 << model.rest_bits
    for hs in range(1 << model.hash_bits):
        lo_global = hs * block
        if lo_global >= n_seeds:
            break
        hi = min(block, n_seeds - lo_global)
        base, masks = model.model_for_hash(hs)
        slack = max(
            slack,
            kernels.linear_seed_max_defect(
                base, masks, p.A, p.b, pair.b_in, pair.b_out, lam, pair.big_lambda, 0, hi
            ),
        )

    return SoftToHardReport(
        exact_probability=exact,
        generator_probability=gen.probability,
        gamma_inner=abs(cube_in - seed_in),
        gamma_outer=abs(cube_out - seed_out),
        delta_slack=slack,
        boundary_mass=mass,
        big_lambda=pair.big_lambda,
        seed_space_size=n_seeds,
    )
