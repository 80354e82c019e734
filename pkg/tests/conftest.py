"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the library's own implementation
choices: the encoder oracle multiplies by an explicit generator matrix, the
CRC oracle divides in integer arithmetic, and the reliability oracle runs
the polarization recursion in exact rationals.  Agreement between the two
routes is what the unit tests assert.
"""

from fractions import Fraction

import numpy as np
import pytest

from polarbf import bp, polar
from polarbf.polar import bit_reversal_permutation


# -- oracles ---------------------------------------------------------------


def generator_matrix(N):
    """Dense GF(2) generator: kernel power followed by bit-reversal columns."""
    g = np.array([[1]], dtype=np.uint8)
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    while g.shape[0] < N:
        g = np.kron(f, g)
    return g[:, bit_reversal_permutation(N)]


def encode_by_matrix(u, N):
    return (np.asarray(u, dtype=np.uint8) @ generator_matrix(N)) % 2


def crc_remainder_int(payload_bits, poly_bits):
    """CRC remainder via plain integer long division (MSB-first)."""
    poly = int("".join(str(b) for b in poly_bits), 2)
    r = len(poly_bits) - 1
    value = 0
    for b in payload_bits:
        value = (value << 1) | int(b)
    value <<= r
    top = value.bit_length()
    while top > r:
        value ^= poly << (top - r - 1)
        top = value.bit_length()
    return [(value >> (r - 1 - i)) & 1 for i in range(r)]


def bhattacharyya_exact(N, design_param):
    """Polarization recursion in exact rational arithmetic.

    Starts from the exact binary-float value of ``design_param`` so the only
    difference from the float64 implementation is accumulated rounding.
    """
    z = [Fraction(design_param)]
    while len(z) < N:
        nxt = []
        for v in z:
            nxt.append(2 * v - v * v)
            nxt.append(v * v)
        z = nxt
    return z


def brute_critical_set(info_mask):
    """Maximal all-information subtrees by explicit block scanning.

    The binary tree over range(N) has one node per aligned block of length
    2^l.  A node is rate-1 when every leaf in its block is information; it
    is maximal when its parent block is not.  The critical set collects the
    first leaf of every maximal rate-1 node.
    """
    N = len(info_mask)

    def full(base, size):
        return all(info_mask[base : base + size])

    out = []
    size = 1
    while size <= N:
        for base in range(0, N, size):
            if not full(base, size):
                continue
            parent = size * 2
            if parent <= N and full((base // parent) * parent, parent):
                continue  # an ancestor is rate-1 too; not maximal
            out.append(base)
        size *= 2
    return sorted(set(out))


# -- fixtures ----------------------------------------------------------------


@pytest.fixture(scope="session")
def code64():
    """The default (64, 32) code with CRC-6."""
    return polar.construct_code(64, 32)


@pytest.fixture(scope="session")
def code16():
    """Small code with CRC-6 for fast end-to-end paths."""
    return polar.construct_code(16, 8)


@pytest.fixture(scope="session")
def code8_plain():
    """Tiny CRC-free code for exhaustive checks."""
    return polar.construct_code(8, 4, crc_degree=0)


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0DE)


@pytest.fixture(scope="session")
def dec5():
    return bp.DecoderConfig(iterations=5)


# -- acceptance reporting ------------------------------------------------------

# One line per acceptance check, echoed after the run so the verdicts
# survive pytest's output capture.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
