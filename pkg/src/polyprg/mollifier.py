"""Gaussian-mollified orthant indicators and shifted approximators.

The hard test function for a polytope is the translated-orthant indicator
O_b(v) = 1[v <= b] applied to v = Au.  Its smooth surrogate replaces each
coordinate's halfline indicator with a Gaussian-smoothed version,

    halfline(theta, lambda, t) = E_g[1[t + lambda*g <= theta]]
                               = Phi((theta - t) / lambda),

and multiplies across coordinates:

    M_{b,lambda}(v) = prod_i halfline(b_i, lambda, v_i).

The product form makes the translation identity M_{b,lambda}(v + D) =
M_{b-v,lambda}(D) immediate and is what the diagnostics below rely on.

Shifting the thresholds down or up by beta = c_beta * lambda * sqrt(2 ln(m/delta))
turns the mollifier into an inner (resp. outer) approximator of O_b: it is
within delta of O_b everywhere except on the inner (resp. outer) strip of
width Lambda = beta + lambda * sqrt(2 ln(m/delta)).  With c_beta = 1 both
defect bounds follow from the Gaussian tail bound Pr[g > t] <= exp(-t^2/2)/2;
the acceptance suite checks them empirically as well.

Phi is evaluated through the C library's erfc (|error| well below 1e-12
absolute over the whole range, with symmetric tail handling); extreme
arguments saturate to 0.0 or 1.0 without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def norm_cdf(x: float) -> float:
    """Standard normal CDF via erfc: Phi(x) = erfc(-x/sqrt(2)) / 2."""
    return 0.5 * math.erfc(-x * _INV_SQRT2)


@dataclass(frozen=True)
class MollifierSpec:
    """Thresholds b and smoothing width lambda > 0."""

    b: np.ndarray
    lam: float

    def __post_init__(self):
        b = np.atleast_1d(np.asarray(self.b, dtype=np.float64))
        if self.lam <= 0:
            raise ValueError("lambda must be > 0")
        if not np.isfinite(b).all():
            raise ValueError("thresholds must be finite")
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return self.b.shape[0]


def halfline(theta: float, lam: float, t: float) -> float:
    """Gaussian-mollified halfline indicator: Phi((theta - t) / lam)."""
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    return norm_cdf((theta - t) / lam)


def mollifier_value(spec: MollifierSpec, v: np.ndarray) -> float:
    """Product of the per-coordinate mollified halflines at v."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    if v.shape != spec.b.shape:
        raise ValueError(f"point has shape {v.shape}, expected {spec.b.shape}")
    out = 1.0
    for bi, vi in zip(spec.b, v):
        out *= halfline(float(bi), spec.lam, float(vi))
    return out


def _erfc_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty(z.size, dtype=np.float64)
    flat = z.ravel()
    for i in range(flat.size):
        out[i] = math.erfc(flat[i])
    return out.reshape(z.shape)


def mollifier_values(spec: MollifierSpec, V: np.ndarray) -> np.ndarray:
    """Vectorized mollifier over rows of V (shape (N, m))."""
    V = np.asarray(V, dtype=np.float64)
    z = (V - spec.b[None, :]) / (spec.lam * math.sqrt(2.0))
    return np.prod(0.5 * _erfc_vec(z), axis=1)


def translation_identity_check(
    spec: MollifierSpec, v: np.ndarray, delta_vec: np.ndarray, tol: float = 1e-12
) -> bool:
    """Check M_{b,lam}(v + D) == M_{b-v,lam}(D) to within tol."""
    v = np.atleast_1d(np.asarray(v, dtype=np.float64))
    delta_vec = np.atleast_1d(np.asarray(delta_vec, dtype=np.float64))
    lhs = mollifier_value(spec, v + delta_vec)
    rhs = mollifier_value(MollifierSpec(spec.b - v, spec.lam), delta_vec)
    return abs(lhs - rhs) <= tol


@dataclass(frozen=True)
class ApproximatorPair:
    """Shifted thresholds for the inner/outer approximators of O_b."""

    b_in: np.ndarray
    b_out: np.ndarray
    beta: float
    big_lambda: float


def approximators(
    b: np.ndarray, lam: float, m: int, delta: float, c_beta: float = 1.0
) -> ApproximatorPair:
    """Inner/outer approximator thresholds b -+ beta and the strip width Lambda.

    beta = c_beta * lam * sqrt(2 ln(m/delta)) (natural log, per the Gaussian
    tail argument); Lambda = beta + lam * sqrt(2 ln(m/delta)).
    """
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if lam <= 0:
        raise ValueError("lambda must be > 0")
    if b.shape[0] != m:
        raise ValueError(f"b has {b.shape[0]} entries, expected m={m}")
    step = lam * math.sqrt(2.0 * math.log(m / delta))
    beta = c_beta * step
    return ApproximatorPair(
        b_in=b - beta, b_out=b + beta, beta=beta, big_lambda=beta + step
    )


@dataclass(frozen=True)
class SandwichViolation:
    point_index: int
    side: str
    value: float
    indicator: int
    defect: float


@dataclass(frozen=True)
class SandwichReport:
    checked_inner: int
    checked_outer: int
    max_defect_inner: float
    max_defect_outer: float
    violations: tuple[SandwichViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json_dict(self) -> dict:
        return {
            "checked_inner": self.checked_inner,
            "checked_outer": self.checked_outer,
            "max_defect_inner": self.max_defect_inner,
            "max_defect_outer": self.max_defect_outer,
            "violations": [vars(v) for v in self.violations],
            "ok": self.ok,
        }


def sandwich_check(
    b: np.ndarray,
    pair: ApproximatorPair,
    lam: float,
    delta: float,
    sample_points: np.ndarray,
) -> SandwichReport:
    """Verify the approximator defects on the supplied points.

    For every point outside the inner strip (O_b minus its Lambda-shrinking)
    the inner approximator must be within delta of O_b; symmetrically the
    outer approximator is checked outside the outer strip.  Points inside
    the respective excluded strip are skipped by contract.
    """
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    V = np.atleast_2d(np.asarray(sample_points, dtype=np.float64))
    m = b.shape[0]
    spec_in = MollifierSpec(pair.b_in, lam)
    spec_out = MollifierSpec(pair.b_out, lam)
    lam_vec = pair.big_lambda

    inside = (V <= b[None, :]).all(axis=1)
    deep = (V <= (b - lam_vec)[None, :]).all(axis=1)
    inside_outer = (V <= (b + lam_vec)[None, :]).all(axis=1)
    in_inner_strip = inside & ~deep
    in_outer_strip = inside_outer & ~inside

    vals_in = mollifier_values(spec_in, V)
    vals_out = mollifier_values(spec_out, V)
    indicator = inside.astype(np.int64)

    violations: list[SandwichViolation] = []
    max_in = 0.0
    max_out = 0.0
    checked_in = 0
    checked_out = 0
    for idx in range(V.shape[0]):
        if not in_inner_strip[idx]:
            checked_in += 1
            defect = abs(vals_in[idx] - indicator[idx])
            max_in = max(max_in, defect)
            if defect > delta:
                violations.append(
                    SandwichViolation(idx, "inner", vals_in[idx], int(indicator[idx]), defect)
                )
        if not in_outer_strip[idx]:
            checked_out += 1
            defect = abs(vals_out[idx] - indicator[idx])
            max_out = max(max_out, defect)
            if defect > delta:
                violations.append(
                    SandwichViolation(idx, "outer", vals_out[idx], int(indicator[idx]), defect)
                )
    return SandwichReport(
        checked_inner=checked_in,
        checked_outer=checked_out,
        max_defect_inner=max_in,
        max_defect_outer=max_out,
        violations=tuple(violations),
    )
