import numpy as np

from qzsg import rng


def splitmix64_reference(master, index):
    mask = (1 << 64) - 1
    z = (master + (index + 1) * 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return (z ^ (z >> 31)) & mask


def test_stream_replays_exactly():
    a = rng.stream(7, rng.STREAM_POVM).standard_normal(16)
    b = rng.stream(7, rng.STREAM_POVM).standard_normal(16)
    assert np.array_equal(a, b)


def test_stream_keys_are_independent():
    a = rng.stream(7, rng.STREAM_POVM).standard_normal(16)
    b = rng.stream(7, rng.STREAM_UTILITIES).standard_normal(16)
    c = rng.stream(8, rng.STREAM_POVM).standard_normal(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_stream_uses_direct_philox_key():
    expected = np.random.Generator(
        np.random.Philox(key=(rng.STREAM_LIPSCHITZ << 64) | 5)
    ).standard_normal(8)
    assert np.array_equal(rng.stream(5, rng.STREAM_LIPSCHITZ).standard_normal(8), expected)


def test_derive_seed_matches_splitmix64():
    for master in (0, 1, 42, 2**64 - 1):
        for index in range(25):
            got = rng.derive_seed(master, index)
            assert got == splitmix64_reference(master, index)
            assert 0 <= got < 2**64
    # first output of the splitmix64 stream seeded with 0
    assert rng.derive_seed(0, 0) == 0xE220A8397B1DCDAF


def test_derive_seed_distinct_across_indexes():
    seeds = {rng.derive_seed(123, i) for i in range(1000)}
    assert len(seeds) == 1000


def test_complex_normal_shape_and_scale():
    gen = rng.stream(0, rng.STREAM_PROPERTIES)
    z = rng.complex_normal(gen, (200, 200))
    assert z.shape == (200, 200) and np.iscomplexobj(z)
    # unit variance per entry: E|z|^2 = 1
    assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.02
    again = rng.complex_normal(rng.stream(0, rng.STREAM_PROPERTIES), (200, 200))
    assert np.array_equal(z, again)
