"""Non-invertible encodings of world points.

Two variants share the same release pipeline (evaluate/reduce, sort,
order-preserving corruption): the polynomial code over Z_p and the
redundant residue code over n distinct primes.  Both are injective before
sorting and keep re-encodings of one point within Hamming distance 2k of
each other, which is what makes threshold matching work.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

from .numtheory import crt_reconstruct, eval_poly, is_prime, primes, to_digits


def digit_count(M: int, p: int) -> int:
    """Smallest m with p^m >= M (exact integer arithmetic, no float log)."""
    m = 0
    bound = 1
    while bound < M:
        bound *= p
        m += 1
    return max(m, 1)


@dataclass(frozen=True)
class PolyCodeParams:
    """Parameters (M, p, n, k) of the polynomial-code variant."""

    M: int
    p: int
    n: int
    k: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if not (0 <= self.k <= self.n <= self.p):
            raise ValueError("need 0 <= k <= n <= p")
        if self.n < self.m:
            raise ValueError(f"code length n={self.n} below digit count m={self.m}")

    @property
    def m(self) -> int:
        return digit_count(self.M, self.p)

    @property
    def tau(self) -> int:
        return 2 * self.k

    @property
    def alphabet(self) -> int:
        return self.p


@dataclass(frozen=True)
class RrnsParams:
    """Parameters of the redundant-residue variant.

    m is derived as the smallest prefix of the prime list whose product
    reaches M; the product of any m-1 moduli must stay below M so that m
    residues always pin down the world point.
    """

    primes: tuple[int, ...]
    M: int
    k: int

    def __post_init__(self):
        object.__setattr__(self, "primes", tuple(self.primes))
        ps = self.primes
        if len(ps) < 1:
            raise ValueError("need at least one modulus")
        if any(ps[i] >= ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError("moduli must be strictly increasing")
        for q in ps:
            if not is_prime(q):
                raise ValueError(f"modulus {q} is not prime")
        if not (0 <= self.k <= self.n):
            raise ValueError("need 0 <= k <= n")
        m = self.m
        if m > self.n:
            raise ValueError("world too large for the given moduli")
        top = math.prod(ps[self.n - m + 1 :])  # largest m-1 moduli
        if not top < self.M:
            raise ValueError("product of the largest m-1 moduli must be < M")

    @property
    def n(self) -> int:
        return len(self.primes)

    @property
    def m(self) -> int:
        prod = 1
        for i, q in enumerate(self.primes):
            prod *= q
            if prod >= self.M:
                return i + 1
        raise ValueError("product of all moduli below M")

    @property
    def tau(self) -> int:
        return 2 * self.k

    @property
    def alphabet(self) -> int:
        return self.primes[-1]


Params = PolyCodeParams | RrnsParams


def basic_encode(x: int, params: PolyCodeParams) -> list[int]:
    """The index-carrying code: the digit polynomial of x evaluated at 0..n-1."""
    if not 0 <= x < params.M:
        raise ValueError(f"x={x} outside world [0, {params.M})")
    digits = to_digits(x, params.p, params.m)
    return [eval_poly(digits, xi, params.p) for xi in range(params.n)]


def rrns_basic_encode(x: int, params: RrnsParams) -> list[int]:
    """The residue vector (x mod p_1, ..., x mod p_n)."""
    if not 0 <= x < params.M:
        raise ValueError(f"x={x} outside world [0, {params.M})")
    return [x % q for q in params.primes]


def sort_code(code: Sequence[int]) -> tuple[int, ...]:
    """Drop the position/index association by sorting non-decreasingly."""
    return tuple(sorted(code))


def corrupt(
    e: Sequence[int], k: int, alphabet: int, rng: random.Random
) -> tuple[int, ...]:
    """Resample k distinct coordinates of a sorted vector, preserving order.

    Each selected coordinate i is redrawn uniformly from the window
    [e_{i-1}, e_{i+1}] (sentinels 0 and alphabet-1), excluding its current
    value whenever the window contains another one.  A saturated window
    leaves the coordinate unchanged.
    """
    n = len(e)
    if k > n:
        raise ValueError("k exceeds vector length")
    out = list(e)
    for i in sorted(rng.sample(range(n), k)):
        lo = out[i - 1] if i > 0 else 0
        hi = out[i + 1] if i + 1 < n else alphabet - 1
        cur = out[i]
        if hi > lo:
            v = rng.randrange(lo, hi)
            if v >= cur:
                v += 1
            out[i] = v
    return tuple(out)


def encode(x: int, params: Params, rng: random.Random) -> tuple[int, ...]:
    """The released encoding: sorted basic code with k coordinates corrupted."""
    if isinstance(params, RrnsParams):
        code = rrns_basic_encode(x, params)
    else:
        code = basic_encode(x, params)
    return corrupt(sort_code(code), params.k, params.alphabet, rng)


def rrns_encode(x: int, params: RrnsParams, rng: random.Random) -> tuple[int, ...]:
    """Sorted, order-preserving-corrupted residue vector of x."""
    return corrupt(sort_code(rrns_basic_encode(x, params)), params.k, params.alphabet, rng)


def encode_unsorted(
    x: int, params: PolyCodeParams, rng: random.Random
) -> tuple[int, ...]:
    """Corrupted basic code with positions intact (no sorting step).

    k distinct coordinates are replaced by uniform values in [0, p); easy
    to analyze but also easy to invert, so only useful as a baseline.
    """
    code = basic_encode(x, params)
    for i in rng.sample(range(params.n), params.k):
        code[i] = rng.randrange(params.p)
    return tuple(code)


# ---------------------------------------------------------------------------
# World inflation: an injective, non-polynomial map into a ~10^39 world
# that raises the digit count m and with it the direct-attack cost.

INFLATION_FACTORS = 16


@lru_cache(maxsize=1)
def _inflation_tables() -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    base = tuple(primes(INFLATION_FACTORS))  # q_1..q_16
    offsets = []
    s = 0
    for q in base:
        offsets.append(s)  # s_i = sum of the primes before q_i
        s += q
    pool = tuple(primes(offsets[-1] + base[-1]))  # q_1..q_381 covers every band
    return base, tuple(offsets), pool


def inflation_domain() -> int:
    """Size of the admissible input range: the product of the first 16 primes."""
    base, _, _ = _inflation_tables()
    return math.prod(base)


def inflate(x: int) -> int:
    """Map x to a square-free integer with exactly 16 prime factors.

    Each residue x mod q_i selects one prime from a band of q_i primes;
    the bands are disjoint, so the factor multiset determines all 16
    residues and the map is injective.
    """
    base, offsets, pool = _inflation_tables()
    if not 0 <= x < inflation_domain():
        raise ValueError("x outside the inflation domain")
    y = 1
    for q, s in zip(base, offsets):
        y *= pool[s + x % q]  # the (s_i + c_i + 1)-th prime, 1-indexed
    return y


def deflate(y: int) -> int:
    """Invert `inflate` by factoring over the known per-band candidate primes."""
    base, offsets, pool = _inflation_tables()
    residues = []
    for q, s in zip(base, offsets):
        for c in range(q):
            if y % pool[s + c] == 0:
                residues.append((c, q))
                y //= pool[s + c]
                break
        else:
            raise ValueError("value is not in the image of inflate")
    if y != 1:
        raise ValueError("value is not in the image of inflate")
    return crt_reconstruct(residues)


def inflation_factors(y: int) -> list[int]:
    """The 16 prime factors of an inflated value, one per band."""
    base, offsets, pool = _inflation_tables()
    factors = []
    for q, s in zip(base, offsets):
        for c in range(q):
            if y % pool[s + c] == 0:
                factors.append(pool[s + c])
                break
        else:
            raise ValueError("value is not in the image of inflate")
    return factors


def inflate_min() -> int:
    """Smallest inflated value, attained at x = 0 (all residues zero)."""
    base, offsets, pool = _inflation_tables()
    return math.prod(pool[s] for s in offsets)


def inflate_range_bound() -> int:
    """Exclusive upper bound on inflated values (every band at its top prime)."""
    base, offsets, pool = _inflation_tables()
    return math.prod(pool[s + q - 1] for q, s in zip(base, offsets)) + 1


def inflated_digit_count(p: int) -> int:
    """Digit count m' needed to encode inflated values in base p."""
    return digit_count(inflate_range_bound(), p)


# ---------------------------------------------------------------------------
# Plain-text parameter files and encoding serialization.


def format_encoding(coords: Sequence[int]) -> str:
    return ",".join(str(c) for c in coords)


def parse_encoding(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.strip().split(","))


def save_params(params: Params, path: str | Path) -> None:
    lines = [f"M={params.M}", f"k={params.k}"]
    if isinstance(params, RrnsParams):
        lines.append("primes=" + ",".join(str(q) for q in params.primes))
    else:
        lines.append(f"p={params.p}")
        lines.append(f"n={params.n}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_params(path: str | Path) -> Params:
    """Read a key=value parameter file; a `primes` key selects the RRNS variant."""
    fields: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        if not _:
            raise ValueError(f"malformed parameter line: {raw!r}")
        fields[key.strip()] = value.strip()
    try:
        M = int(fields["M"])
        k = int(fields["k"])
        if "primes" in fields:
            ps = tuple(int(tok) for tok in fields["primes"].split(","))
            return RrnsParams(primes=ps, M=M, k=k)
        return PolyCodeParams(M=M, p=int(fields["p"]), n=int(fields["n"]), k=k)
    except KeyError as exc:
        raise ValueError(f"missing parameter {exc}") from None
