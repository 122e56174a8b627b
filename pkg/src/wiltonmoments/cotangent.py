"""Exact cotangent sums c0(r/b) and coprime-residue distribution sweeps.

c0(r/b) = -sum_{m=1}^{b-1} (m/b) cot(pi m r / b), evaluated by direct O(b)
summation.  Angles are reduced modulo b before the trig call, and the
cotangent table is mirrored so that cot(pi (b-k)/b) = -cot(pi k/b) holds
exactly in floating point, which transfers the antisymmetry
c0((b-r)/b) = -c0(r/b) to the computed values.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_CHUNK = 64  # r-values per work unit; fixed so reductions are order-stable


@dataclass(frozen=True)
class RationalPoint:
    """A reduced fraction r/b with 0 < r < b."""

    r: int
    b: int

    def __post_init__(self):
        if not 0 < self.r < self.b:
            raise ValueError(f"need 0 < r < b, got {self.r}/{self.b}")
        if math.gcd(self.r, self.b) != 1:
            raise ValueError(f"{self.r}/{self.b} is not reduced")


@dataclass
class DistributionSummary:
    """Empirical even moments of c0(r/b)/b over a coprime residue range."""

    b: int
    a0: float
    a1: float
    count: int
    normalized_moments: list[float]

    def to_dict(self) -> dict:
        return {
            "b": self.b,
            "a0": self.a0,
            "a1": self.a1,
            "count": self.count,
            "normalized_moments": list(self.normalized_moments),
        }


def neumaier_sum(values: np.ndarray) -> float:
    """Compensated total of a 1-D array.

    Pairwise partial sums per 4096-element block, then a Neumaier sweep
    over the block results; symmetric under global negation.
    """
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        return 0.0
    blocks = [float(np.sum(v[i : i + 4096])) for i in range(0, v.size, 4096)]
    s = 0.0
    comp = 0.0
    for x in blocks:
        t = s + x
        if abs(s) >= abs(x):
            comp += (s - t) + x
        else:
            comp += (x - t) + s
        s = t
    return s + comp


@lru_cache(maxsize=8)
def _cot_table(b: int) -> np.ndarray:
    """cot(pi k / b) for k = 0..b-1 (entry 0 unused), exactly antisymmetric."""
    table = np.zeros(b)
    half = (b - 1) // 2
    k = np.arange(1, half + 1, dtype=np.float64)
    theta = (np.pi / b) * k
    table[1 : half + 1] = np.cos(theta) / np.sin(theta)
    table[b - half : b] = -table[1 : half + 1][::-1]
    if b % 2 == 0:
        table[b // 2] = 0.0
    return table


def c0(p: RationalPoint) -> float:
    """The cotangent sum at a reduced fraction, direct O(b) summation."""
    b, r = p.b, p.r
    table = _cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    idx = (m * r) % b
    # m r = 0 (mod b) would mean cot(0); impossible for reduced r/b
    assert idx.all(), "residue hit zero despite coprimality"
    terms = (m.astype(np.float64) / b) * table[idx]
    return -neumaier_sum(terms)


def _coprime_residues(b: int, a0: float, a1: float) -> np.ndarray:
    lo = max(1, math.ceil(a0 * b))
    hi = min(b - 1, math.floor(a1 * b))
    if hi < lo:
        raise ValueError(f"empty residue range [{a0}*{b}, {a1}*{b}]")
    r = np.arange(lo, hi + 1, dtype=np.int64)
    return r[np.gcd(r, b) == 1]


def c0_sweep(
    b: int,
    a0: float,
    a1: float,
    k_max: int,
    sample: int | None = None,
    seed: int = 0,
    threads: int | None = None,
) -> DistributionSummary:
    """Even empirical moments of c0(r/b)/b over coprime r in [a0*b, a1*b].

    The classical range is 1/2 < a0 < a1 < 1; anything inside (0, 1] is
    accepted.  With sample set, that many residues are drawn without
    replacement (seeded).  Worker threads change the wall time only: the
    moment accumulators merge in fixed chunk order, so results are
    reproducible bit for bit.
    """
    if b < 3:
        raise ValueError("b must be at least 3")
    if not 0.0 < a0 < a1 <= 1.0:
        raise ValueError(f"need 0 < a0 < a1 <= 1, got ({a0}, {a1})")
    if k_max < 1:
        raise ValueError("k_max must be positive")
    rs = _coprime_residues(b, a0, a1)
    if sample is not None and sample < rs.size:
        rng = np.random.default_rng(seed)
        rs = np.sort(rng.choice(rs, size=sample, replace=False))

    table = _cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    m_over_b = m.astype(np.float64) / b

    def chunk_values(chunk: np.ndarray) -> np.ndarray:
        out = np.empty(chunk.size)
        for i, r in enumerate(chunk):
            idx = (m * int(r)) % b
            out[i] = -neumaier_sum(m_over_b * table[idx])
        return out

    chunks = [rs[i : i + _CHUNK] for i in range(0, rs.size, _CHUNK)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(chunk_values, chunks))
    else:
        results = [chunk_values(c) for c in chunks]

    moment_sums = np.zeros(k_max)
    for vals in results:  # fixed order: independent of worker count
        scaled = vals / b
        sq = scaled * scaled
        acc = sq.copy()
        for j in range(k_max):
            moment_sums[j] += neumaier_sum(acc)
            if j + 1 < k_max:
                acc = acc * sq
    count = int(rs.size)
    return DistributionSummary(
        b=b,
        a0=a0,
        a1=a1,
        count=count,
        normalized_moments=[float(s / count) for s in moment_sums],
    )


def c0_values(b: int, rs: np.ndarray) -> np.ndarray:
    """c0(r/b) for an array of residues (assumed coprime to b)."""
    table = _cot_table(b)
    m = np.arange(1, b, dtype=np.int64)
    m_over_b = m.astype(np.float64) / b
    out = np.empty(len(rs))
    for i, r in enumerate(rs):
        idx = (m * int(r)) % b
        out[i] = -neumaier_sum(m_over_b * table[idx])
    return out
