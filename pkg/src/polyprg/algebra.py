"""GF(2^s) arithmetic, seed streams, and limited-independence primitives.

Field elements are integers in [0, 2^s) whose binary digits are the
coefficients of a polynomial over GF(2); arithmetic is carried out modulo
a fixed irreducible polynomial of degree s.  One polynomial is tabulated
per degree (the smallest irreducible polynomial of that degree, written
as an integer with the x^s bit included), so outputs are bit-exact and
reproducible:

    s=1 : x + 1                  0x3
    s=2 : x^2 + x + 1            0x7
    s=3 : x^3 + x + 1            0xB
    s=4 : x^4 + x + 1            0x13
    s=8 : x^8 + x^4 + x^3 + x + 1  0x11B
    ... (full table in _IRREDUCIBLE; every entry is verified irreducible
         by the test suite)

Two limited-independence constructions are built on top of the field, both
by evaluating a random low-degree polynomial at fixed points:

* k-wise uniform strings in {-1,+1}^n: the output at position j is the
  least-significant bit of p(e_j), where p has degree < k with coefficients
  read from the seed, and e_j is the binary encoding of j (0-based).
  Bit 0 maps to +1, bit 1 maps to -1.
* r-wise uniform hash functions [n] -> [L] (L a power of two): the bucket
  of j is the top log2(L) bits of p(e_j), degree < r.

Seed bits are consumed sequentially from a SeedStream: coefficients in
increasing degree order (constant term first), and within each s-bit
coefficient the first bit consumed is the most significant.  Hex seeds
are read most-significant bit of the first hex digit first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Smallest irreducible polynomial of each degree s, 1 <= s <= 32.
_IRREDUCIBLE: dict[int, int] = {
    1: 0x3,
    2: 0x7,
    3: 0xB,
    4: 0x13,
    5: 0x25,
    6: 0x43,
    7: 0x83,
    8: 0x11B,
    9: 0x203,
    10: 0x409,
    11: 0x805,
    12: 0x1009,
    13: 0x201B,
    14: 0x4021,
    15: 0x8003,
    16: 0x1002B,
    17: 0x20009,
    18: 0x40009,
    19: 0x80027,
    20: 0x100009,
    21: 0x200005,
    22: 0x400003,
    23: 0x800021,
    24: 0x100001B,
    25: 0x2000009,
    26: 0x400001B,
    27: 0x8000027,
    28: 0x10000003,
    29: 0x20000005,
    30: 0x40000003,
    31: 0x80000009,
    32: 0x10000008D,
}

MAX_DEGREE = 32


class SeedUnderflowError(Exception):
    """Raised when a read goes past the end of a seed stream."""


def min_field_degree(n: int) -> int:
    """Smallest s with 2^s >= n (and s >= 1).  n may not exceed 2^32."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    s = max(1, (n - 1).bit_length())
    if s > MAX_DEGREE:
        raise ValueError(f"n={n} needs field degree {s} > {MAX_DEGREE}")
    return s


def gf_mul_int(a: int, b: int, s: int) -> int:
    """Product of two elements of GF(2^s), given as integers."""
    if s not in _IRREDUCIBLE:
        raise ValueError(f"unsupported field degree {s}")
    mod = _IRREDUCIBLE[s]
    top = 1 << s
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= mod
    return r


def gf_pow_int(a: int, e: int, s: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = gf_mul_int(r, a, s)
        a = gf_mul_int(a, a, s)
        e >>= 1
    return r


def gf_inv_int(a: int, s: int) -> int:
    """Multiplicative inverse in GF(2^s); a must be nonzero."""
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(2^s)")
    return gf_pow_int(a, (1 << s) - 2, s)


@dataclass(frozen=True)
class FieldElement:
    """An element of GF(2^s): value < 2^s, arithmetic mod the tabulated polynomial."""

    value: int
    s: int

    def __post_init__(self):
        if not 1 <= self.s <= MAX_DEGREE:
            raise ValueError(f"field degree must be in [1, {MAX_DEGREE}], got {self.s}")
        if not 0 <= self.value < (1 << self.s):
            raise ValueError(f"value {self.value} out of range for GF(2^{self.s})")

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return gf_mul(self, other)

    def __add__(self, other: "FieldElement") -> "FieldElement":
        if self.s != other.s:
            raise ValueError(f"mismatched field degrees {self.s} and {other.s}")
        return FieldElement(self.value ^ other.value, self.s)

    def inverse(self) -> "FieldElement":
        return FieldElement(gf_inv_int(self.value, self.s), self.s)


def gf_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Field product; the operands must live in the same GF(2^s)."""
    if a.s != b.s:
        raise ValueError(f"mismatched field degrees {a.s} and {b.s}")
    return FieldElement(gf_mul_int(a.value, b.value, a.s), a.s)


class SeedStream:
    """A finite bit sequence consumed sequentially, never re-read.

    The stream is positional: `read(t)` returns the next t bits as an
    integer whose most significant bit is the first bit consumed.
    """

    def __init__(self, value: int, nbits: int):
        if nbits < 0:
            raise ValueError("nbits must be >= 0")
        if value < 0 or value >> nbits:
            raise ValueError(f"value does not fit in {nbits} bits")
        self._value = value
        self._nbits = nbits
        self._cursor = 0

    @classmethod
    def from_int(cls, value: int, nbits: int) -> "SeedStream":
        return cls(value, nbits)

    @classmethod
    def from_hex(cls, hexstr: str, nbits: int | None = None) -> "SeedStream":
        """Parse a hex seed; the first hex digit's MSB is consumed first.

        If nbits is given it must not exceed 4*len(hexstr); the stream is
        truncated to its first nbits bits.
        """
        hexstr = hexstr.strip().removeprefix("0x")
        total = 4 * len(hexstr)
        value = int(hexstr, 16) if hexstr else 0
        if nbits is None:
            nbits = total
        if nbits > total:
            raise ValueError(f"hex string has only {total} bits, {nbits} requested")
        value >>= total - nbits
        return cls(value, nbits)

    @property
    def bits_remaining(self) -> int:
        return self._nbits - self._cursor

    @property
    def bits_consumed(self) -> int:
        return self._cursor

    def read(self, t: int) -> int:
        if t < 0:
            raise ValueError("cannot read a negative number of bits")
        if self._cursor + t > self._nbits:
            raise SeedUnderflowError(
                f"seed underflow: {t} bits requested, {self.bits_remaining} remaining"
            )
        shift = self._nbits - self._cursor - t
        out = (self._value >> shift) & ((1 << t) - 1) if t else 0
        self._cursor += t
        return out


@dataclass(frozen=True)
class KWiseSpec:
    """k-wise uniform +-1 strings of length n over GF(2^s); seed length k*s bits."""

    n: int
    k: int
    s: int

    def __post_init__(self):
        if self.n < 1 or self.k < 1:
            raise ValueError("n and k must be >= 1")
        if not 1 <= self.s <= MAX_DEGREE:
            raise ValueError(f"field degree must be in [1, {MAX_DEGREE}]")
        if (1 << self.s) < self.n:
            raise ValueError(f"need 2^s >= n, got s={self.s}, n={self.n}")

    @property
    def seed_bits(self) -> int:
        return self.k * self.s


@dataclass(frozen=True)
class HashSpec:
    """r-wise uniform hash family [n] -> [L], L a power of two; seed length r*s bits."""

    n: int
    L: int
    r: int
    s: int

    def __post_init__(self):
        if self.n < 1 or self.r < 1:
            raise ValueError("n and r must be >= 1")
        if self.L < 1 or self.L & (self.L - 1):
            raise ValueError(f"L must be a power of two, got {self.L}")
        if not 1 <= self.s <= MAX_DEGREE:
            raise ValueError(f"field degree must be in [1, {MAX_DEGREE}]")
        if (1 << self.s) < max(self.n, self.L):
            raise ValueError(
                f"need 2^s >= max(n, L), got s={self.s}, n={self.n}, L={self.L}"
            )

    @property
    def seed_bits(self) -> int:
        return self.r * self.s


def _read_coeffs(seed: SeedStream, count: int, s: int) -> list[int]:
    # Constant term first; each coefficient is s bits, MSB consumed first.
    return [seed.read(s) for _ in range(count)]


def _poly_eval(coeffs: list[int], point: int, s: int) -> int:
    # Horner from the highest-degree coefficient; addition in GF(2^s) is XOR.
    acc = 0
    for c in reversed(coeffs):
        acc = gf_mul_int(acc, point, s) ^ c
    return acc


def kwise_bits(spec: KWiseSpec, seed: SeedStream) -> np.ndarray:
    """Draw the k-wise uniform string u in {-1,+1}^n selected by the seed.

    u[j] is +1 when the least-significant bit of p(e_j) is 0 and -1 when
    it is 1, where p is the degree-(k-1) polynomial with coefficients read
    from the seed and e_j is the binary encoding of j.
    """
    coeffs = _read_coeffs(seed, spec.k, spec.s)
    out = np.empty(spec.n, dtype=np.int8)
    for j in range(spec.n):
        out[j] = 1 - 2 * (_poly_eval(coeffs, j, spec.s) & 1)
    return out


def hash_buckets(spec: HashSpec, seed: SeedStream) -> np.ndarray:
    """Evaluate the seeded hash at every index, consuming one r*s-bit segment.

    The bucket of j is the top log2(L) bits of p(e_j).
    """
    coeffs = _read_coeffs(seed, spec.r, spec.s)
    shift = spec.s - (spec.L.bit_length() - 1)
    out = np.empty(spec.n, dtype=np.int64)
    for j in range(spec.n):
        out[j] = _poly_eval(coeffs, j, spec.s) >> shift
    return out


def hash_eval(spec: HashSpec, seed: SeedStream, j: int) -> int:
    """Bucket of index j under the hash selected by the seed.

    Consumes the full r*s-bit hash segment; for a fixed seed the map
    j -> bucket is a pure function (re-evaluate with a fresh stream over
    the same bits to query another index).
    """
    if not 0 <= j < spec.n:
        raise ValueError(f"index {j} out of range [0, {spec.n})")
    coeffs = _read_coeffs(seed, spec.r, spec.s)
    shift = spec.s - (spec.L.bit_length() - 1)
    return _poly_eval(coeffs, j, spec.s) >> shift
