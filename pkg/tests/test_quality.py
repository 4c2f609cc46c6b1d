"""Quality-battery tests: keyset combinatorics, collision and bias metrics
cross-checked against naive oracles and analytically transparent stub hashes."""

import itertools
import math

import pytest

from intermithash import hashes, quality
from intermithash.quality import (
    CapacityError,
    CollisionModel,
    Cyclic,
    Permutation,
    Sparse,
    TwoBytes,
    Window,
    Zeros,
    avalanche_bias,
    collision_probability,
    count_collisions,
    differential_test,
    distribution_bias,
    gen_keyset,
    keyset_stats,
    run_battery,
)
from intermithash.speck import SPECK128_128, encrypt_block

from oracles import birthday_exact, bit_bias_naive, collisions_naive


# ----------------------------------------------------------------- stubs


class _StubHasher:
    """Minimal streaming hasher for analytically transparent test hashes."""

    def __init__(self, digest_size, fn, buf=b""):
        self.digest_size = digest_size
        self._fn = fn
        self._buf = buf

    def update(self, data):
        self._buf += bytes(data)
        return self

    def digest(self):
        return self._fn(self._buf)

    def hexdigest(self):
        return self.digest().hex()

    def copy(self):
        return _StubHasher(self.digest_size, self._fn, self._buf)


def constant_hash():
    return lambda: _StubHasher(16, lambda m: b"\xaa" * 16)


def identity16_hash():
    # digest = first 16 message bytes, zero padded: aliasing made explicit
    return lambda: _StubHasher(16, lambda m: (m + bytes(16))[:16])


def xorfold_hash():
    # 8-byte input folded to 4 bytes: bit i collides with bit i+32
    def fold(m):
        m = (m + bytes(8))[:8]
        return bytes(a ^ b for a, b in zip(m[:4], m[4:]))

    return lambda: _StubHasher(4, fold)


def counter_speck_hash():
    """Ideal-uniform stub: successive counters through the verified cipher."""
    key = bytes(range(16))
    cell = itertools.count()

    def fn(_m):
        return encrypt_block(SPECK128_128, key, next(cell).to_bytes(16, "little"))

    return lambda: _StubHasher(16, fn)


def opaque(name):
    """Hide the registry name so speck constructions take the generic path."""

    class _Opaque:
        def __init__(self, inner=None):
            self._inner = inner if inner is not None else hashes.new(name)
            self.digest_size = self._inner.digest_size

        def update(self, data):
            self._inner.update(data)
            return self

        def digest(self):
            return self._inner.digest()

        def copy(self):
            return _Opaque(self._inner.copy())

    return _Opaque


# ----------------------------------------------------- keyset combinatorics


def test_twobytes_count_matches_enumeration():
    for max_len in (1, 2, 3, 4):
        spec = TwoBytes(max_len)
        assert spec.count() == sum(1 for _ in spec.messages())
    assert TwoBytes(4).count() == sum(
        255 * L + 255 * 255 * math.comb(L, 2) for L in range(1, 5)
    )


def test_twobytes_matches_bruteforce_scan_of_all_short_strings():
    want = set()
    for length in (1, 2):
        for combo in itertools.product(range(256), repeat=length):
            if 1 <= sum(1 for b in combo if b) <= 2:
                want.add(bytes(combo))
    got = list(TwoBytes(2).messages())
    assert len(got) == len(set(got)) == TwoBytes(2).count()
    assert set(got) == want


def test_sparse_count_and_enumeration():
    spec = Sparse(32, 2)
    msgs = list(spec.messages())
    assert spec.count() == 1 + 32 + math.comb(32, 2) == 529
    assert len(msgs) == len(set(msgs)) == 529
    assert bytes(4) in msgs  # the zero message is the j=0 term
    assert all(len(m) == 4 for m in msgs)


def test_permutation_count_and_aliasing_structure():
    spec = Permutation()
    assert spec.count() == sum(math.perm(8, k) for k in range(9)) == 109_601
    small = Permutation(quality.PERMUTATION_BLOCKS[:4])
    msgs = list(small.messages())
    assert len(msgs) == len(set(msgs)) == small.count() == 1 + 4 + 12 + 24 + 24
    assert b"" in msgs
    with pytest.raises(ValueError):
        Permutation((b"\x00" * 4, b"\x00" * 4))


def test_window_groups_and_vectorized_rows_agree():
    spec = Window(8, 12)
    assert spec.count() == 64 * 4096
    for position in (0, 1, 13, 63):
        from_ints = list(spec.group_messages(position))
        assert len(set(from_ints)) == 4096
        rows = spec.group_array(position)
        assert [bytes(r) for r in rows] == from_ints
    with pytest.raises(ValueError):
        Window(8, 64)


def test_zeros_enumerates_every_length_once():
    msgs = list(Zeros(100).messages())
    assert [len(m) for m in msgs] == list(range(100))
    assert all(set(m) <= {0} for m in msgs)


def test_cyclic_structure_and_seed_sensitivity():
    spec = Cyclic(4, 3, 50)
    a = list(spec.messages(seed=1))
    b = list(spec.messages(seed=1))
    c = list(spec.messages(seed=2))
    assert a == b and a != c
    assert all(len(m) == 12 and m == m[:4] * 3 for m in a)
    assert spec.count() == 50


def test_oversized_keysets_are_rejected():
    with pytest.raises(CapacityError):
        gen_keyset(TwoBytes(200))
    with pytest.raises(CapacityError):
        count_collisions("md5", TwoBytes(8), budget_bytes=1 << 20)


# ------------------------------------------------- collisions vs naive oracle


@pytest.mark.parametrize("name", ["md5", "dm-speck128"])
def test_collision_count_matches_sort_scan_oracle(name):
    spec = TwoBytes(2)
    digests = [hashes.digest(name, m) for m in spec.messages()]
    assert count_collisions(name, spec) == collisions_naive(digests)


def test_identity_stub_collisions_match_oracle_and_intuition():
    spec = TwoBytes(2)
    fac = identity16_hash()
    digests = [fac().update(m).digest() for m in spec.messages()]
    got = count_collisions(fac, spec)
    assert got == collisions_naive(digests)
    assert got > 0  # m and m+"\x00" truncate identically


def test_speck_twobytes_padding_collisions_are_nonzero_and_md5_clean():
    spec = TwoBytes(2)
    assert count_collisions("md5", spec) == 0
    for name in ("dm-speck128", "mmo-speck128", "mp-speck128"):
        assert count_collisions(name, spec) > 0


def test_zeros_prefix_path_equals_generic_path():
    spec = Zeros(300)
    for name in ("md5", "mmo-speck128"):
        fast = keyset_stats(name, spec)
        slow = keyset_stats(name, spec, _force_generic=True)
        assert fast == slow


@pytest.mark.parametrize("L,expect", [(17, 16), (256, 240)])
def test_zeros_collision_formula_small_scales(L, expect):
    assert expect == L - math.ceil(max(L - 1, 1) / 16)
    for name in ("dm-speck128", "mmo-speck128", "mp-speck128"):
        assert count_collisions(name, Zeros(L)) == expect
    assert count_collisions("md5", Zeros(L)) == 0


def test_window_counts_collisions_per_window_not_pooled():
    spec = Window(8, 12)
    r = keyset_stats(constant_hash(), spec)
    # 64 windows of 4096 constant digests each: (4096-1) per window
    assert r.collisions == 64 * 4095
    assert r.distribution_bias_pct is None
    assert r.sample_count == spec.count()


def test_window_vectorized_path_equals_generic_path():
    spec = Window(8, 8)
    fast = keyset_stats("dm-speck128", spec)
    slow = keyset_stats(opaque("dm-speck128"), spec)
    assert fast.collisions == slow.collisions == 0


# ------------------------------------------------------------- distribution


def test_constant_hash_distribution_is_fully_biased():
    assert distribution_bias(constant_hash(), Cyclic(4, 2, 1500)) == 100.0


def test_uniform_counter_stub_distribution_is_tight():
    assert distribution_bias(counter_speck_hash(), Cyclic(8, 8, 100_000)) < 2.0


def test_distribution_bias_matches_naive_oracle():
    spec = Cyclic(4, 2, 1200)
    fac = identity16_hash()
    digests = [fac().update(m).digest() for m in spec.messages(seed=0)]
    got = distribution_bias(fac, spec)
    assert got == pytest.approx(bit_bias_naive(digests), abs=1e-12)


def test_distribution_preconditions():
    with pytest.raises(ValueError):
        distribution_bias("md5", Cyclic(4, 2, 999))
    with pytest.raises(ValueError):
        distribution_bias("md5", Window(8, 12))


def test_zeros_distribution_ordering_speck_vs_md5():
    # the constructions collapse zeros onto few digests; md5 stays spread
    md5_bias = keyset_stats("md5", Zeros(65536)).distribution_bias_pct
    dm_bias = keyset_stats("dm-speck128", Zeros(65536)).distribution_bias_pct
    assert dm_bias > md5_bias


# ---------------------------------------------------------------- avalanche


def test_identity_truncation_avalanche_is_total():
    assert avalanche_bias(identity16_hash(), 16, 10_000) == 100.0


def test_avalanche_rejects_tiny_samples():
    with pytest.raises(ValueError):
        avalanche_bias("md5", 32, 5000)


def test_avalanche_batch_path_equals_generic_path():
    fast = avalanche_bias("dm-speck128", 16, 10_000, seed=5)
    slow = avalanche_bias(opaque("dm-speck128"), 16, 10_000, seed=5)
    assert fast == slow


def test_avalanche_sane_for_real_hashes_at_small_scale():
    assert avalanche_bias("md5", 16, 10_000) < 5.0
    assert avalanche_bias("mp-speck128", 16, 10_000) < 5.0


# -------------------------------------------------------------- differential


def test_differential_clean_for_real_hashes():
    assert differential_test("md5", 8, 1, 50) == 0
    assert differential_test("dm-speck128", 8, 1, 50) == 0


def test_differential_xorfold_matches_bruteforce_subset_enumeration():
    fac = xorfold_hash()

    def fold_mask(subset):
        m = bytearray(8)
        for bit in subset:
            m[bit >> 3] |= 1 << (bit & 7)
        return bytes(a ^ b for a, b in zip(m[:4], m[4:]))

    pairs = 20
    expected = sum(
        pairs
        for subset in itertools.combinations(range(64), 2)
        if fold_mask(subset) == bytes(4)
    )
    assert expected == 32 * pairs  # exactly the {i, i+32} subsets
    assert differential_test(fac, 8, 2, pairs) == expected
    assert differential_test(fac, 8, 1, pairs) == 0


def test_differential_batch_path_equals_generic_path():
    fast = differential_test("mmo-speck128", 8, 1, 30, seed=9)
    slow = differential_test(opaque("mmo-speck128"), 8, 1, 30, seed=9)
    assert fast == slow == 0


def test_differential_rejects_large_subsets():
    with pytest.raises(ValueError):
        differential_test("md5", 8, 3, 10)


# ------------------------------------------------------------ birthday bound


def test_birthday_approximation_against_exact_product():
    assert abs(collision_probability(23, 365) - birthday_exact(23, 365)) < 0.01
    assert birthday_exact(23, 365) == pytest.approx(0.5073, abs=5e-4)


def test_birthday_known_points_and_clamps():
    assert collision_probability(1, 10) == 0.0
    assert collision_probability(0, 10) == 0.0
    assert collision_probability(2, 2) == pytest.approx(1 - math.exp(-0.5))
    assert collision_probability(10**9, 365) == 1.0


def test_birthday_monotonicity():
    for n in (2**8, 2**16):
        probs = [collision_probability(k, n) for k in range(1, 101)]
        assert all(a <= b for a, b in zip(probs, probs[1:]))
    for k in (10, 40):
        assert collision_probability(k, 2**8) >= collision_probability(k, 2**16)


def test_collision_model_wrapper():
    assert CollisionModel(23, 365).probability() == collision_probability(23, 365)
    with pytest.raises(ValueError):
        CollisionModel(-1, 10)
    with pytest.raises(ValueError):
        CollisionModel(5, 0)
    with pytest.raises(ValueError):
        collision_probability(5, 0)


# ---------------------------------------------------------------- battery


def test_battery_rows_are_complete_and_deterministic():
    tests = ("avalanche", "twobytes", "differential", "zeros")
    kw = dict(hash_names=("md5", "dm-speck128"), tests=tests, scale="small")
    rows1 = run_battery(seed=7, **kw)
    rows2 = run_battery(seed=7, **kw)
    assert rows1 == rows2
    assert [(r.hash_name, r.test) for r in rows1] == [
        (h, t) for h in ("md5", "dm-speck128") for t in tests
    ]
    by = {(r.hash_name, r.test): r for r in rows1}
    assert by[("md5", "avalanche")].avalanche_bias_pct < 5.0
    assert by[("md5", "twobytes")].collisions == 0
    assert by[("dm-speck128", "twobytes")].collisions > 0
    assert by[("dm-speck128", "zeros")].collisions == 4096 - math.ceil(4095 / 16)
    assert by[("md5", "differential")].collisions == 0
    assert by[("md5", "twobytes")].distribution_bias_pct is not None


def test_battery_seed_changes_randomized_tests():
    kw = dict(hash_names=("md5",), tests=("cyclic",), scale="small")
    r1 = run_battery(seed=1, **kw)[0]
    r2 = run_battery(seed=2, **kw)[0]
    assert r1.distribution_bias_pct != r2.distribution_bias_pct


def test_battery_rejects_unknown_names():
    with pytest.raises(ValueError):
        run_battery(hash_names=("sha1",), tests=("zeros",), scale="small")
    with pytest.raises(ValueError):
        run_battery(hash_names=("md5",), tests=("nope",), scale="small")
    with pytest.raises(ValueError):
        quality.battery_params("huge")
