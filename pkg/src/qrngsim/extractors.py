"""Randomness extraction: von Neumann debiasing and Toeplitz hashing.

The Toeplitz matrix-vector product over GF(2) is computed as an exact
integer convolution done in 2^16-bit blocks with 2^17-point real FFTs.
Per-block convolution coefficients never exceed 2^16, so FFT roundoff is
orders of magnitude below 0.5 and rounding back to integers is exact; the
parity of the accumulated integer counts is the GF(2) result.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import BudgetError, ValidationError
from .randomness import BitStream
from .streams import substream

_BLOCK = 1 << 16
_NFFT = 1 << 17


def extract_von_neumann(raw: BitStream) -> BitStream:
    """Pairwise debiasing: 01 -> 0, 10 -> 1, 00/11 discarded.

    On independent identically distributed input the output is exactly
    unbiased whatever the input bias. A trailing unpaired bit is dropped.
    """
    bits = raw.bits
    n_pairs = bits.size // 2
    first = bits[: 2 * n_pairs : 2]
    second = bits[1 : 2 * n_pairs : 2]
    out = first[first != second]
    return BitStream(bits=out, provenance=raw.provenance, seed=raw.seed)


def toeplitz_generator_bits(seed: int, out_len: int, in_len: int) -> np.ndarray:
    """The out_len + in_len - 1 seeded bits that define the Toeplitz matrix.

    Entry (i, j) of the matrix is bit i - j + in_len - 1, so index
    in_len - 1 starts the first column and lower indices fill the first row.
    """
    rng = substream(seed, "toeplitz", out_len, in_len)
    return (rng.random(out_len + in_len - 1) < 0.5).astype(np.uint8)


def _convolve_parity(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Parity of the full integer convolution of two 0/1 sequences."""
    out = np.zeros(a.size + b.size - 1, dtype=np.int64)
    fa = [
        (i, min(_BLOCK, a.size - i), np.fft.rfft(a[i : i + _BLOCK].astype(float), _NFFT))
        for i in range(0, a.size, _BLOCK)
    ]
    fb = [
        (j, min(_BLOCK, b.size - j), np.fft.rfft(b[j : j + _BLOCK].astype(float), _NFFT))
        for j in range(0, b.size, _BLOCK)
    ]
    for i, la, block_a in fa:
        for j, lb, block_b in fb:
            seg = np.fft.irfft(block_a * block_b, _NFFT)[: la + lb - 1]
            out[i + j : i + j + la + lb - 1] += np.rint(seg).astype(np.int64)
    return (out & 1).astype(np.uint8)


def gf2_toeplitz_apply(gen_bits: np.ndarray, x_bits: np.ndarray, out_len: int) -> np.ndarray:
    """Multiply the Toeplitz matrix defined by gen_bits into x_bits over GF(2)."""
    gen = np.ascontiguousarray(gen_bits, dtype=np.uint8)
    x = np.ascontiguousarray(x_bits, dtype=np.uint8)
    n = x.size
    if gen.size != out_len + n - 1:
        raise ValidationError(
            f"generator needs {out_len + n - 1} bits for a {out_len}x{n} Toeplitz matrix, got {gen.size}"
        )
    if out_len == 0:
        return np.zeros(0, dtype=np.uint8)
    if n == 0:
        return np.zeros(out_len, dtype=np.uint8)
    full = _convolve_parity(gen, x)
    return full[n - 1 : n - 1 + out_len]


def extract_toeplitz(
    raw: BitStream,
    out_len: int,
    seed: int,
    entropy_budget_bits: float | None = None,
) -> BitStream:
    """Hash raw bits through a seeded out_len x raw.length Toeplitz matrix.

    When entropy_budget_bits is given (total certified bits, usually
    bound * raw.length from an audit), out_len beyond its floor raises
    BudgetError; the caller contract is out_len <= floor(budget).
    """
    if out_len < 0:
        raise ValidationError(f"out_len must be >= 0, got {out_len}")
    if entropy_budget_bits is not None:
        allowed = math.floor(entropy_budget_bits)
        if out_len > allowed:
            raise BudgetError(
                f"requested {out_len} output bits but the entropy budget allows only "
                f"{allowed} (= floor({entropy_budget_bits:.6f}))"
            )
    if out_len == 0:
        return BitStream(bits=np.zeros(0, dtype=np.uint8), provenance=raw.provenance, seed=int(seed))
    gen = toeplitz_generator_bits(int(seed), int(out_len), raw.length)
    out = gf2_toeplitz_apply(gen, raw.bits, int(out_len))
    return BitStream(bits=out, provenance=raw.provenance, seed=int(seed))
