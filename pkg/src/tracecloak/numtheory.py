"""Modular-arithmetic and big-integer primitives.

Everything here works on plain Python ints, so world points far beyond
64 bits (the inflated world needs ~130 bits) are handled transparently.
"""

from __future__ import annotations

from typing import Iterable, Sequence


class SingularSystemError(ValueError):
    """Raised when an interpolation system has repeated evaluation points."""


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin.

    The fixed base set is exact for all n < 3.3e24, far beyond any
    modulus used by the encoders.
    """
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes(count: int, start: int = 2) -> list[int]:
    """The `count` consecutive primes >= start, ascending."""
    if count < 0:
        raise ValueError("count must be non-negative")
    out: list[int] = []
    n = max(2, start)
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n += 1
    return out


def to_digits(x: int, p: int, m: int) -> list[int]:
    """Base-p digits of x, least-significant first, zero-padded to length m."""
    if x < 0 or x >= p**m:
        raise ValueError(f"x={x} out of range [0, {p}^{m})")
    digits = []
    for _ in range(m):
        digits.append(x % p)
        x //= p
    return digits


def from_digits(digits: Sequence[int], p: int) -> int:
    x = 0
    for d in reversed(digits):
        x = x * p + d
    return x


def eval_poly(digits: Sequence[int], xi: int, p: int) -> int:
    """Evaluate the polynomial with coefficients `digits` at xi over Z_p (Horner)."""
    acc = 0
    for d in reversed(digits):
        acc = (acc * xi + d) % p
    return acc


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            out[i + j] = (out[i + j] + ai * bj) % p
    return out


def vandermonde_solve(
    points: Sequence[tuple[int, int]], m: int, p: int
) -> list[int]:
    """Coefficients of the unique degree-(m-1) polynomial through `points` over Z_p.

    `points` is a sequence of m (evaluation index, value) pairs.  Uses
    Lagrange interpolation; raises SingularSystemError on repeated indices.
    """
    if len(points) != m:
        raise ValueError(f"expected {m} points, got {len(points)}")
    xs = [xi % p for xi, _ in points]
    if len(set(xs)) != m:
        raise SingularSystemError("repeated evaluation indices")
    coeffs = [0] * m
    for j, (xj, yj) in enumerate(points):
        basis = [1]
        denom = 1
        for i, (xi, _) in enumerate(points):
            if i == j:
                continue
            basis = _poly_mul(basis, [(-xi) % p, 1], p)
            denom = denom * (xj - xi) % p
        scale = yj * pow(denom, -1, p) % p
        for t, c in enumerate(basis):
            coeffs[t] = (coeffs[t] + c * scale) % p
    return coeffs


def crt_reconstruct(residues: Iterable[tuple[int, int]]) -> int:
    """The unique x in [0, prod moduli) with x = v_i (mod p_i).

    `residues` is an iterable of (value, modulus) pairs with pairwise
    coprime moduli.
    """
    x = 0
    mod = 1
    for v, p in residues:
        t = (v - x) * pow(mod, -1, p) % p
        x += mod * t
        mod *= p
    return x
