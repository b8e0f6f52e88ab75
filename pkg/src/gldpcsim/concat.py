"""Concatenation of an outer bounded-distance code with the inner BP decoder.

The outer code is modeled abstractly (a genie decoder that fixes up to t
symbol errors) rather than implemented: the quantity of interest is how
often the inner decoder leaves more than t errors on the systematic bits
it hands upward.  The outer word is shortened to fit the inner info block.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from gldpcsim.channel import awgn_llr, modulate_qpsk


@dataclass(frozen=True)
class OuterCodeModel:
    """Length/dimension of the outer code and its correction radius t."""

    n_out: int
    k_out: int
    t: int

    def __post_init__(self):
        if self.k_out <= 0 or self.n_out < self.k_out:
            raise ValueError("need 0 < k_out <= n_out")
        if self.t < 0:
            raise ValueError("correction radius t must be nonnegative")

    @property
    def rate(self) -> Fraction:
        return Fraction(self.k_out, self.n_out)

    def shortened_payload(self, n_eff: int) -> int:
        """Info bits carried once the outer word is shortened to n_eff symbols."""
        if not 0 < n_eff <= self.n_out:
            raise ValueError(f"shortened length must lie in 1..{self.n_out}")
        return n_eff * self.k_out // self.n_out


def outer_decode_model(decoded_info, true_info, t: int) -> bool:
    """Genie bounded-distance verdict: True iff at most t symbol errors."""
    a = np.asarray(decoded_info)
    b = np.asarray(true_info)
    if a.shape != b.shape:
        raise ValueError("decoded and true info blocks differ in shape")
    return int(np.count_nonzero(a != b)) <= t


def overall_rate(inner_rate, outer: OuterCodeModel) -> Fraction:
    return Fraction(inner_rate) * outer.rate


@dataclass(frozen=True)
class ConcatTrial:
    success: bool
    info_errors: int    # errors on the inner systematic block before the outer stage
    info_length: int
    inner_converged: bool
    iterations: int

    def success_at(self, t: int) -> bool:
        """Re-judge the same trial under a different correction radius."""
        return self.info_errors <= t


def run_concatenated_trial(decoder, encoder, outer: OuterCodeModel,
                           sigma: float, rng, i_max: int = 10) -> ConcatTrial:
    """One frame: random info, inner encode, AWGN/QPSK, BP decode, outer verdict.

    Deterministic for a fixed rng seed.  The outer stage never touches the
    channel; it only thresholds the inner decoder's residual info errors.
    """
    rng = np.random.default_rng(rng)
    info = rng.integers(0, 2, size=encoder.k, dtype=np.uint8)
    word = encoder.encode(info)
    llr = awgn_llr(modulate_qpsk(word), sigma, rng)
    out = decoder.decode(llr, i_max=i_max)
    decoded_info = out.hard_bits[np.asarray(encoder.info_positions)]
    errs = int(np.count_nonzero(decoded_info != info))
    return ConcatTrial(
        success=outer_decode_model(decoded_info, info, outer.t),
        info_errors=errs,
        info_length=encoder.k,
        inner_converged=bool(out.converged),
        iterations=int(out.iterations_used),
    )
