"""Labeled-frame dataset files ("PBFD") and run-manifest helpers.

A dataset stores, per collected frame: the SNR it was simulated at, its
frame index (which, with the manifest seed, regenerates payload and noise
exactly), the float32 channel LLRs, the true payload, the plain-BP hard
decision, the exhaustive single-flip label mask over the information set,
and a correctable flag.  Decoder traces are deliberately NOT stored — a
(64,32) metadata tensor is ~500x the size of its LLR row and is cheap to
regenerate deterministically.

Byte layout, little-endian throughout::

    header:  magic "PBFD" | version u32 | N u32 | K u32 | crc_degree u32
             | iterations u32 | record_count u64 | manifest_hash 32 B
    record:  ebn0_db f32 | frame_index u64 | llrs f32[N]
             | payload bits, packed, ceil((K-crc_degree)/8) B
             | u_hat bits, packed, ceil(N/8) B
             | label bits, packed, ceil(K/8) B
             | correctable u8

Bit-packing is big-endian within bytes (numpy packbits default).  Records
appear in collection order: ascending SNR, then ascending frame index.
"""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

DATASET_MAGIC = b"PBFD"
DATASET_VERSION = 1

_HEADER = struct.Struct("<4sIIIIIQ32s")


@dataclass
class Dataset:
    """Columnar view of one PBFD file (or of frames about to become one)."""

    N: int
    K: int
    crc_degree: int
    iterations: int
    manifest_hash: bytes
    ebn0_db: np.ndarray      # (R,) float32
    frame_index: np.ndarray  # (R,) uint64
    llrs: np.ndarray         # (R, N) float32
    payload: np.ndarray      # (R, K - crc_degree) uint8
    u_hat: np.ndarray        # (R, N) uint8
    label: np.ndarray        # (R, K) uint8
    correctable: np.ndarray  # (R,) bool

    def __post_init__(self):
        r = len(self.ebn0_db)
        shapes = {
            "frame_index": (r,),
            "llrs": (r, self.N),
            "payload": (r, self.K - self.crc_degree),
            "u_hat": (r, self.N),
            "label": (r, self.K),
            "correctable": (r,),
        }
        for name, want in shapes.items():
            got = getattr(self, name).shape
            if got != want:
                raise ValueError(f"{name}: shape {got} != {want}")
        if len(self.manifest_hash) != 32:
            raise ValueError("manifest_hash must be 32 bytes")
        mismatch = self.correctable != self.label.any(axis=1)
        if mismatch.any():
            raise ValueError(
                f"{int(mismatch.sum())} records where correctable != label.any()"
            )

    def __len__(self):
        return len(self.ebn0_db)

    def select(self, index):
        """Row subset (mask or fancy index) as a new Dataset."""
        return Dataset(
            self.N, self.K, self.crc_degree, self.iterations, self.manifest_hash,
            self.ebn0_db[index], self.frame_index[index], self.llrs[index],
            self.payload[index], self.u_hat[index], self.label[index],
            self.correctable[index],
        )

    @property
    def snr_grid(self):
        return np.unique(self.ebn0_db)


def _packed_width(bits):
    return (bits + 7) // 8


def _pack_rows(rows):
    return np.packbits(np.asarray(rows, dtype=np.uint8), axis=1)


def _unpack_rows(packed, bits):
    return np.unpackbits(packed, axis=1, count=bits)


def write_dataset(path, ds):
    """Write a :class:`Dataset` to ``path`` in the PBFD layout."""
    header = _HEADER.pack(
        DATASET_MAGIC, DATASET_VERSION, ds.N, ds.K, ds.crc_degree,
        ds.iterations, len(ds), ds.manifest_hash,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        if len(ds) == 0:
            return
        fh.write(np.ascontiguousarray(ds.ebn0_db, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(ds.frame_index, dtype="<u8").tobytes())
        fh.write(np.ascontiguousarray(ds.llrs, dtype="<f4").tobytes())
        fh.write(_pack_rows(ds.payload).tobytes())
        fh.write(_pack_rows(ds.u_hat).tobytes())
        fh.write(_pack_rows(ds.label).tobytes())
        fh.write(ds.correctable.astype(np.uint8).tobytes())


def read_dataset(path):
    """Read a PBFD file back into a :class:`Dataset`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated header")
    magic, version, n, k, crc_degree, iterations, count, mhash = _HEADER.unpack_from(raw)
    if magic != DATASET_MAGIC:
        raise ValueError(f"{path}: bad magic {magic!r}")
    if version != DATASET_VERSION:
        raise ValueError(f"{path}: unsupported version {version}")
    payload_len = k - crc_degree
    sections = [
        ("ebn0_db", "<f4", count),
        ("frame_index", "<u8", count),
        ("llrs", "<f4", count * n),
        ("payload_p", np.uint8, count * _packed_width(payload_len)),
        ("u_hat_p", np.uint8, count * _packed_width(n)),
        ("label_p", np.uint8, count * _packed_width(k)),
        ("correctable", np.uint8, count),
    ]
    expected = _HEADER.size + sum(np.dtype(d).itemsize * c for _, d, c in sections)
    if len(raw) != expected:
        raise ValueError(f"{path}: {len(raw)} bytes, expected {expected}")
    offset = _HEADER.size
    cols = {}
    for name, dtype, cnt in sections:
        arr = np.frombuffer(raw, dtype=dtype, count=cnt, offset=offset)
        offset += arr.nbytes
        cols[name] = arr
    return Dataset(
        N=n, K=k, crc_degree=crc_degree, iterations=iterations,
        manifest_hash=mhash,
        ebn0_db=cols["ebn0_db"].astype(np.float32),
        frame_index=cols["frame_index"].astype(np.uint64),
        llrs=cols["llrs"].reshape(count, n).astype(np.float32),
        payload=_unpack_rows(
            cols["payload_p"].reshape(count, -1), payload_len
        ) if count else np.zeros((0, payload_len), np.uint8),
        u_hat=_unpack_rows(cols["u_hat_p"].reshape(count, -1), n)
        if count else np.zeros((0, n), np.uint8),
        label=_unpack_rows(cols["label_p"].reshape(count, -1), k)
        if count else np.zeros((0, k), np.uint8),
        correctable=cols["correctable"].astype(bool),
    )


def concat_datasets(parts):
    """Stack per-SNR collections into one Dataset (headers must agree)."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to concatenate")
    first = parts[0]
    for p in parts[1:]:
        same = (
            p.N == first.N and p.K == first.K
            and p.crc_degree == first.crc_degree
            and p.iterations == first.iterations
            and p.manifest_hash == first.manifest_hash
        )
        if not same:
            raise ValueError("dataset headers disagree")
    cat = lambda name: np.concatenate([getattr(p, name) for p in parts])
    return Dataset(
        first.N, first.K, first.crc_degree, first.iterations, first.manifest_hash,
        cat("ebn0_db"), cat("frame_index"), cat("llrs"), cat("payload"),
        cat("u_hat"), cat("label"), cat("correctable"),
    )


# -- manifests ----------------------------------------------------------------

def load_manifest(path):
    """Parse a JSON manifest file into a plain dict."""
    with open(path) as fh:
        return json.load(fh)


def manifest_hash(manifest):
    """sha256 over the canonical JSON form (sorted keys, tight separators)."""
    canon = json.dumps(manifest, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).digest()


def file_digest(path):
    """Short content identifier (sha256 hex prefix) for CSV headers."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()[:12]
