"""Frame-dataset container and file format."""

import numpy as np
import pytest

from polarbf.dataset import (
    DATASET_MAGIC,
    Dataset,
    concat_datasets,
    file_digest,
    manifest_hash,
    read_dataset,
    write_dataset,
)


def make_dataset(n=10, N=64, K=32, crc_degree=6, iterations=5, seed=0, ebn0=1.0):
    r = np.random.default_rng(seed)
    label = (r.random((n, K)) < 0.15).astype(np.uint8)
    return Dataset(
        N=N, K=K, crc_degree=crc_degree, iterations=iterations,
        manifest_hash=bytes(range(32)),
        ebn0_db=np.full(n, ebn0, np.float32),
        frame_index=np.arange(n, dtype=np.uint64),
        llrs=r.normal(size=(n, N)).astype(np.float32),
        payload=r.integers(0, 2, (n, K - crc_degree), dtype=np.uint8),
        u_hat=r.integers(0, 2, (n, N), dtype=np.uint8),
        label=label,
        correctable=label.any(axis=1),
    )


def test_round_trip_bit_exact(tmp_path):
    ds = make_dataset(17)
    path = tmp_path / "frames.pbfd"
    write_dataset(path, ds)
    back = read_dataset(path)
    assert (back.N, back.K, back.crc_degree, back.iterations) == (64, 32, 6, 5)
    assert back.manifest_hash == ds.manifest_hash
    for field in ("ebn0_db", "frame_index", "llrs", "payload", "u_hat", "label"):
        assert np.array_equal(getattr(back, field), getattr(ds, field)), field
    assert np.array_equal(back.correctable, ds.correctable)


def test_rewrite_is_byte_identical(tmp_path):
    ds = make_dataset(9)
    a, b = tmp_path / "a.pbfd", tmp_path / "b.pbfd"
    write_dataset(a, ds)
    write_dataset(b, read_dataset(a))
    assert a.read_bytes() == b.read_bytes()


def test_magic_and_header(tmp_path):
    path = tmp_path / "x.pbfd"
    write_dataset(path, make_dataset(3))
    blob = path.read_bytes()
    assert blob[:4] == DATASET_MAGIC


def test_empty_dataset_round_trip(tmp_path):
    ds = make_dataset(0)
    path = tmp_path / "empty.pbfd"
    write_dataset(path, ds)
    back = read_dataset(path)
    assert len(back) == 0
    assert back.llrs.shape == (0, 64)


def test_select_and_snr_grid(tmp_path):
    a = make_dataset(6, ebn0=0.0, seed=1)
    b = make_dataset(4, ebn0=2.0, seed=2)
    both = concat_datasets([a, b])
    assert len(both) == 10
    assert both.snr_grid.tolist() == [0.0, 2.0]
    sub = both.select(both.ebn0_db == 2.0)
    assert len(sub) == 4
    assert np.array_equal(sub.llrs, b.llrs)


def test_concat_rejects_mismatched_headers():
    a = make_dataset(3, iterations=5)
    b = make_dataset(3, iterations=12)
    with pytest.raises(ValueError):
        concat_datasets([a, b])


def test_validation_catches_inconsistent_correctable():
    ds = make_dataset(4)
    bad = ds.correctable.copy()
    if not bad.any():
        pytest.skip("all-zero labels in fixture draw")
    bad[np.nonzero(bad)[0][0]] = False
    with pytest.raises(ValueError):
        Dataset(
            N=ds.N, K=ds.K, crc_degree=ds.crc_degree, iterations=ds.iterations,
            manifest_hash=ds.manifest_hash, ebn0_db=ds.ebn0_db,
            frame_index=ds.frame_index, llrs=ds.llrs, payload=ds.payload,
            u_hat=ds.u_hat, label=ds.label, correctable=bad,
        )


def test_read_rejects_corruption(tmp_path):
    path = tmp_path / "x.pbfd"
    write_dataset(path, make_dataset(5))
    blob = path.read_bytes()
    bad_magic = tmp_path / "bad_magic.pbfd"
    bad_magic.write_bytes(b"XXXX" + blob[4:])
    with pytest.raises(ValueError):
        read_dataset(bad_magic)
    truncated = tmp_path / "trunc.pbfd"
    truncated.write_bytes(blob[:-5])
    with pytest.raises(ValueError):
        read_dataset(truncated)
    padded = tmp_path / "padded.pbfd"
    padded.write_bytes(blob + b"\x00")
    with pytest.raises(ValueError):
        read_dataset(padded)


def test_manifest_hash_is_key_order_invariant():
    a = {"x": 1, "y": {"p": [1, 2], "q": "s"}}
    b = {"y": {"q": "s", "p": [1, 2]}, "x": 1}
    assert manifest_hash(a) == manifest_hash(b)
    assert manifest_hash(a) != manifest_hash({"x": 2, "y": a["y"]})
    assert len(manifest_hash(a)) == 32


def test_file_digest_stable(tmp_path):
    path = tmp_path / "f.pbfd"
    write_dataset(path, make_dataset(2))
    d1 = file_digest(path)
    d2 = file_digest(path)
    assert d1 == d2 and len(d1) == 12
