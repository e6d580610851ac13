import itertools
import random

import numpy as np
import pytest

from tracecloak.encoder import (
    PolyCodeParams,
    RrnsParams,
    basic_encode,
    corrupt,
    deflate,
    digit_count,
    encode,
    encode_unsorted,
    format_encoding,
    inflate,
    inflate_min,
    inflate_range_bound,
    inflated_digit_count,
    inflation_domain,
    inflation_factors,
    load_params,
    parse_encoding,
    rrns_basic_encode,
    rrns_encode,
    save_params,
    sort_code,
)
from tracecloak.matcher import hamming

SMALL = PolyCodeParams(M=49, p=7, n=5, k=0)
DESK = PolyCodeParams(M=10**4, p=31, n=10, k=2)


def test_digit_counts():
    assert SMALL.m == 2
    assert DESK.m == 3
    assert PolyCodeParams(M=10**19, p=503, n=100, k=10).m == 8
    assert digit_count(1, 7) == 1


def test_param_validation():
    with pytest.raises(ValueError):
        PolyCodeParams(M=49, p=6, n=5, k=0)  # composite modulus
    with pytest.raises(ValueError):
        PolyCodeParams(M=49, p=7, n=8, k=0)  # n > p
    with pytest.raises(ValueError):
        PolyCodeParams(M=10**6, p=7, n=5, k=0)  # n < m
    with pytest.raises(ValueError):
        PolyCodeParams(M=49, p=7, n=5, k=6)  # k > n


def test_basic_encode_example():
    assert basic_encode(17, SMALL) == [3, 5, 0, 2, 4]
    assert basic_encode(0, SMALL) == [0, 0, 0, 0, 0]
    assert hamming(basic_encode(17, SMALL), basic_encode(0, SMALL)) == 4


def test_basic_encode_out_of_range():
    with pytest.raises(ValueError):
        basic_encode(49, SMALL)


def test_basic_encode_injective_and_min_distance_exhaustive():
    codes = [tuple(basic_encode(x, SMALL)) for x in range(SMALL.M)]
    assert len(set(codes)) == SMALL.M
    d = min(
        hamming(a, b) for a, b in itertools.combinations(codes, 2)
    )
    assert d == SMALL.n - SMALL.m + 1


def test_basic_min_distance_larger_world():
    # p=17, n=12, m=3: pairwise distance of all 17^3 basic codes is n-m+1
    params = PolyCodeParams(M=17**3, p=17, n=12, k=0)
    codes = np.array([basic_encode(x, params) for x in range(params.M)], dtype=np.int16)
    best = params.n
    for i in range(0, params.M, 256):
        chunk = codes[i : i + 256]
        dists = (chunk[:, None, :] != codes[None, :, :]).sum(axis=2)
        np.fill_diagonal(dists[:, i : i + 256], params.n)
        best = min(best, int(dists.min()))
    assert best == params.n - params.m + 1


def test_sort_code():
    assert sort_code([3, 5, 0, 2, 4]) == (0, 2, 3, 4, 5)
    assert sort_code([0, 2, 3]) == (0, 2, 3)
    assert sort_code([4, 4, 4]) == (4, 4, 4)


def test_corrupt_identity_at_k0():
    rng = random.Random(0)
    assert corrupt((0, 2, 3, 4, 5), 0, 7, rng) == (0, 2, 3, 4, 5)


def test_corrupt_window_enumeration():
    # when the last coordinate of (0,2,3,4,5) is selected, the window is
    # {4,5,6} minus the current value 5
    outcomes = set()
    for seed in range(500):
        out = corrupt((0, 2, 3, 4, 5), 1, 7, random.Random(seed))
        if out[:4] == (0, 2, 3, 4) and out[4] != 5:  # last position was selected
            outcomes.add(out)
    assert outcomes == {(0, 2, 3, 4, 4), (0, 2, 3, 4, 6)}


def test_corrupt_properties():
    rng = random.Random(1)
    for _ in range(10_000):
        n = rng.randint(1, 12)
        p = rng.choice([7, 17, 31])
        if n > p:
            continue
        e = tuple(sorted(rng.randrange(p) for _ in range(n)))
        k = rng.randint(0, n)
        out = corrupt(e, k, p, rng)
        assert list(out) == sorted(out)
        assert all(0 <= c < p for c in out)
        assert hamming(e, out) <= k


def test_encode_recall_bound():
    rng = random.Random(2)
    for _ in range(2000):
        x = rng.randrange(DESK.M)
        a = encode(x, DESK, rng)
        b = encode(x, DESK, rng)
        assert hamming(a, b) <= DESK.tau


def test_encode_deterministic_at_k0():
    rng = random.Random(3)
    assert encode(17, SMALL, rng) == (0, 2, 3, 4, 5)


def test_encode_unsorted_properties():
    rng = random.Random(4)
    params = PolyCodeParams(M=10**4, p=31, n=10, k=2)
    for _ in range(2000):
        x = rng.randrange(params.M)
        e = encode_unsorted(x, params, rng)
        assert hamming(e, basic_encode(x, params)) <= params.k
    k0 = PolyCodeParams(M=10**4, p=31, n=10, k=0)
    x = rng.randrange(k0.M)
    assert encode_unsorted(x, k0, rng) == tuple(basic_encode(x, k0))


def test_rrns_params_derivation():
    params = RrnsParams(primes=(3, 5, 7), M=100, k=0)
    assert params.m == 3
    assert params.n == 3
    with pytest.raises(ValueError):
        # largest m-1 moduli already reach M: m residues cannot pin x down
        RrnsParams(primes=(3, 5, 7, 11, 13), M=100, k=0)
    with pytest.raises(ValueError):
        RrnsParams(primes=(5, 3, 7), M=20, k=0)  # not increasing


def test_rrns_encode_examples():
    params = RrnsParams(primes=(3, 5, 7), M=100, k=0)
    rng = random.Random(5)
    assert rrns_encode(17, params, rng) == (2, 2, 3)
    assert rrns_encode(0, params, rng) == (0, 0, 0)


def test_rrns_basic_min_distance_exhaustive():
    params = RrnsParams(primes=(11, 13, 17, 19, 23), M=2000, k=0)
    assert params.m == 3
    codes = np.array(
        [rrns_basic_encode(x, params) for x in range(params.M)], dtype=np.int16
    )
    best = params.n
    for i in range(0, params.M, 256):
        chunk = codes[i : i + 256]
        dists = (chunk[:, None, :] != codes[None, :, :]).sum(axis=2)
        np.fill_diagonal(dists[:, i : i + 256], params.n)
        best = min(best, int(dists.min()))
    assert best == params.n - params.m + 1


def test_rrns_recall_bound():
    params = RrnsParams(
        primes=(97, 101, 103, 107, 109, 113, 127, 131), M=10**6, k=2
    )
    rng = random.Random(6)
    for _ in range(2000):
        x = rng.randrange(params.M)
        a = rrns_encode(x, params, rng)
        b = rrns_encode(x, params, rng)
        assert hamming(a, b) <= params.tau
        assert all(0 <= c < params.alphabet for c in a)


def test_inflation_offsets_and_range():
    from tracecloak.encoder import _inflation_tables

    base, offsets, _ = _inflation_tables()
    assert base[:3] == (2, 3, 5)
    assert offsets[:3] == (0, 2, 5)
    assert inflation_domain() > 10**19
    assert inflate(0) == inflate_min()
    assert inflate_min() < inflate_range_bound()


def test_inflate_round_trip_and_factors():
    rng = random.Random(7)
    for _ in range(500):
        x = rng.randrange(inflation_domain())
        y = inflate(x)
        assert deflate(y) == x
        factors = inflation_factors(y)
        assert len(factors) == 16
        assert len(set(factors)) == 16  # square-free
        import math

        assert math.prod(factors) == y


def test_inflated_digit_count():
    assert inflated_digit_count(503) == 15


def test_inflate_out_of_range():
    with pytest.raises(ValueError):
        inflate(-1)
    with pytest.raises(ValueError):
        inflate(inflation_domain())


def test_encoding_serialization():
    assert format_encoding((0, 2, 3)) == "0,2,3"
    assert parse_encoding("0,2,3") == (0, 2, 3)


def test_param_file_round_trip(tmp_path):
    poly = tmp_path / "poly.txt"
    save_params(DESK, poly)
    assert load_params(poly) == DESK

    rrns = RrnsParams(primes=(11, 13, 17, 19, 23), M=2000, k=1)
    path = tmp_path / "rrns.txt"
    save_params(rrns, path)
    assert load_params(path) == rrns


def test_param_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("M=100\n")
    with pytest.raises(ValueError):
        load_params(path)
    path.write_text("garbage line\n")
    with pytest.raises(ValueError):
        load_params(path)
