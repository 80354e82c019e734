"""Polar code construction, encoding, and CRC handling.

A code instance is described by a :class:`CodeConfig`: block length N = 2**n,
K information positions chosen by Bhattacharyya-parameter ranking over a BEC
with a configurable design erasure probability, and a CRC whose check bits
occupy the tail of the information set.  Encoding applies the N x N binary
kernel power followed by the bit-reversal permutation; both are implemented
as index operations rather than matrix products.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

# x^6 + x^5 + 1, most significant coefficient first.
CRC6_POLY = (1, 1, 0, 0, 0, 0, 1)


def _require_block_length(N):
    if N < 2 or (N & (N - 1)) != 0:
        raise ValueError(f"block length must be a power of two >= 2, got {N}")


def bit_reversal_permutation(N):
    """Permutation brp with brp[j] = bit-reversal of j in log2(N) bits.

    The permutation is an involution: applying it twice is the identity.

    Parameters
    ----------
    N : int
        Power-of-two length.

    Returns
    -------
    ndarray of int64, shape (N,)
    """
    _require_block_length(N)
    n = N.bit_length() - 1
    idx = np.arange(N)
    rev = np.zeros(N, dtype=np.int64)
    for _ in range(n):
        rev = (rev << 1) | (idx & 1)
        idx >>= 1
    return rev


def bhattacharyya_parameters(N, design_param=0.5):
    """Bhattacharyya parameters of the N synthesized channels.

    Starts from a BEC with erasure probability ``design_param`` and applies
    the polarization recursion z -> {2z - z^2, z^2}; the degraded branch
    lands on the even child so the returned vector is in natural (non
    bit-reversed) index order: entry i is obtained by applying the recursion
    along the bits of i from most significant to least significant.

    Returns
    -------
    ndarray of float64, shape (N,)
        Higher value = less reliable synthesized channel.
    """
    _require_block_length(N)
    if not 0.0 < design_param < 1.0:
        raise ValueError(f"design parameter must be in (0, 1), got {design_param}")
    z = np.array([design_param], dtype=np.float64)
    while z.size < N:
        nxt = np.empty(2 * z.size, dtype=np.float64)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return z


@dataclass(frozen=True)
class CodeConfig:
    """Static description of one polar code instance.

    ``info_set`` and ``frozen_set`` are sorted index arrays partitioning
    range(N).  The information word carried on ``info_set`` (in ascending
    index order) is payload followed by ``crc_degree`` check bits.
    """

    N: int
    K: int
    n: int
    info_set: np.ndarray
    frozen_set: np.ndarray
    crc_degree: int = 6
    crc_poly: tuple = CRC6_POLY
    design_param: float = 0.5

    def __post_init__(self):
        _require_block_length(self.N)
        if self.n != self.N.bit_length() - 1:
            raise ValueError(f"n={self.n} inconsistent with N={self.N}")
        info = np.asarray(self.info_set, dtype=np.int64)
        frozen = np.asarray(self.frozen_set, dtype=np.int64)
        object.__setattr__(self, "info_set", info)
        object.__setattr__(self, "frozen_set", frozen)
        if info.size != self.K or frozen.size != self.N - self.K:
            raise ValueError("info/frozen set sizes inconsistent with K")
        merged = np.concatenate([info, frozen])
        merged.sort()
        if not np.array_equal(merged, np.arange(self.N)):
            raise ValueError("info_set and frozen_set must partition range(N)")
        if np.any(np.diff(info) <= 0) or np.any(np.diff(frozen) < 0):
            raise ValueError("index sets must be sorted ascending")
        if self.crc_degree != len(self.crc_poly) - 1:
            raise ValueError("crc_degree inconsistent with crc_poly length")
        if self.crc_degree and self.crc_poly[0] != 1:
            raise ValueError("CRC polynomial must have a leading 1")
        # K == 0 (fully frozen) is tolerated for analysis tooling only.
        if 0 < self.K <= self.crc_degree:
            raise ValueError(
                f"K={self.K} leaves no payload after {self.crc_degree} CRC bits"
            )

    @property
    def payload_len(self):
        return self.K - self.crc_degree


def construct_code(N, K, design_param=0.5, crc_degree=6):
    """Build a :class:`CodeConfig` by Bhattacharyya ranking.

    The K indices with the smallest Bhattacharyya parameter form the
    information set; exact ties prefer the higher index (higher indices
    polarize toward reliable).

    Parameters
    ----------
    N : int
        Block length, a power of two.
    K : int
        Number of information positions (payload + CRC), 0 < K < N and
        K > crc_degree.
    design_param : float
        BEC design erasure probability in (0, 1).
    crc_degree : int
        0 disables the CRC (test configurations).

    Returns
    -------
    CodeConfig
    """
    _require_block_length(N)
    if not 0 < K < N:
        raise ValueError(f"K out of range: need 0 < K < {N}, got {K}")
    z = bhattacharyya_parameters(N, design_param)
    # Primary key: z ascending.  Secondary: index descending, so exact ties
    # hand the slot to the higher index.
    order = np.lexsort((-np.arange(N), z))
    info = np.sort(order[:K])
    frozen = np.sort(order[K:])
    poly = CRC6_POLY if crc_degree == 6 else _default_poly(crc_degree)
    return CodeConfig(
        N=N,
        K=K,
        n=N.bit_length() - 1,
        info_set=info,
        frozen_set=frozen,
        crc_degree=crc_degree,
        crc_poly=poly,
        design_param=design_param,
    )


def _default_poly(degree):
    if degree == 0:
        return (1,)
    if degree == 6:
        return CRC6_POLY
    raise ValueError(f"no built-in CRC polynomial of degree {degree}")


def crc_remainder(bits, poly=CRC6_POLY):
    """Remainder of bits * x^r divided by poly, MSB-first long division."""
    poly = np.asarray(poly, dtype=np.uint8)
    r = poly.size - 1
    if r == 0:
        return np.zeros(0, dtype=np.uint8)
    work = np.concatenate([np.asarray(bits, dtype=np.uint8), np.zeros(r, np.uint8)])
    for i in range(work.size - r):
        if work[i]:
            work[i : i + r + 1] ^= poly
    return work[-r:]


def crc_attach(payload, poly=CRC6_POLY):
    """Append the CRC remainder of ``payload`` (degree-many bits)."""
    payload = np.asarray(payload, dtype=np.uint8)
    return np.concatenate([payload, crc_remainder(payload, poly)])


def crc_check(word, poly=CRC6_POLY):
    """True when the whole word (payload followed by CRC bits) is divisible."""
    poly = np.asarray(poly, dtype=np.uint8)
    r = poly.size - 1
    if r == 0:
        return True
    word = np.asarray(word, dtype=np.uint8)
    if word.size < r:
        raise ValueError(f"word of {word.size} bits is shorter than the CRC ({r})")
    work = word.copy()
    for i in range(work.size - r):
        if work[i]:
            work[i : i + r + 1] ^= poly
    return not work[-r:].any()


def assemble_u(payload, config):
    """Place payload + CRC on the information set of a length-N vector.

    Frozen positions are zero.  The information word (payload followed by
    ``config.crc_degree`` check bits) fills ``config.info_set`` in ascending
    index order.
    """
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size != config.payload_len:
        raise ValueError(
            f"payload length {payload.size} != K - r = {config.payload_len}"
        )
    u = np.zeros(config.N, dtype=np.uint8)
    u[config.info_set] = crc_attach(payload, config.crc_poly)
    return u


def encode(u, config):
    """Encode u into a codeword: kernel power then bit-reversal permutation.

    Butterflies apply (a, b) -> (a XOR b, b) along every index bit; the
    bit-reversal permutation is applied last, so x[j] equals the transformed
    vector at the bit-reversed position of j.
    """
    u = np.asarray(u, dtype=np.uint8)
    if u.ndim != 1 or u.size != config.N:
        raise ValueError(f"u must be a length-{config.N} bit vector")
    v = u.copy()
    half = 1
    while half < config.N:
        blocks = v.reshape(-1, 2 * half)
        blocks[:, :half] ^= blocks[:, half:]
        half *= 2
    return v[bit_reversal_permutation(config.N)]


def extract_payload(info_bits, config):
    """Payload portion (first K - r bits) of a decoded information word."""
    info_bits = np.asarray(info_bits)
    if info_bits.size != config.K:
        raise ValueError(f"expected {config.K} information bits")
    return info_bits[: config.payload_len]


def code_from_frozen_set(N, frozen_set, design_param=0.5, crc_degree=6):
    """Build a :class:`CodeConfig` from an explicit frozen set.

    The information set is the complement; K follows from it.  Used to load
    externally specified constructions (see :func:`read_frozen_set_file`).
    """
    frozen = np.sort(np.asarray(frozen_set, dtype=np.int64))
    info = np.setdiff1d(np.arange(N), frozen)
    return CodeConfig(
        N=N,
        K=int(info.size),
        n=N.bit_length() - 1,
        info_set=info,
        frozen_set=frozen,
        crc_degree=crc_degree,
        crc_poly=_default_poly(crc_degree),
        design_param=design_param,
    )


def write_frozen_set_file(config, path):
    """Write the frozen set as text: a header line then one index per line."""
    with open(path, "w") as fh:
        fh.write(f"N={config.N} K={config.K} design={config.design_param}\n")
        for j in config.frozen_set:
            fh.write(f"{int(j)}\n")


def read_frozen_set_file(path):
    """Read a frozen-set fixture; returns (N, K, design_param, indices)."""
    with open(path) as fh:
        header = fh.readline().split()
        fields = dict(item.split("=", 1) for item in header)
        N = int(fields["N"])
        K = int(fields["K"])
        design = float(fields["design"])
        idx = np.array([int(line) for line in fh if line.strip()], dtype=np.int64)
    if idx.size != N - K:
        raise ValueError(f"expected {N - K} frozen indices, found {idx.size}")
    return N, K, design, idx
