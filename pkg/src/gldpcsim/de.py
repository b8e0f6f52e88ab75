"""Erasure-channel density evolution for the mixed SPC/GC ensemble.

Tracks the per-iteration edge erasure probability x of a (J=2, K)-regular
ensemble in which a fraction nu of checks are generalized.  The variable
side is degree 2, so the recursion is simply x <- eps * mix(x); the check
side mixes the single-parity-check EXIT curve with the component code's
exact extrinsic erasure probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from gldpcsim.component import ComponentCode, default_component_code
from gldpcsim.graph import design_rate

CONVERGED_BELOW = 1e-12
ITERATION_CAP = 100_000


@dataclass(frozen=True)
class DeEnsemble:
    """Asymptotic (J, K)-regular ensemble with a GC fraction of nu."""

    J: int
    K: int
    nu: float
    comp: ComponentCode = field(default_factory=default_component_code)

    def __post_init__(self):
        if not 0.0 <= float(self.nu) <= 1.0:
            raise ValueError("nu must lie in [0, 1]")
        if self.K != self.comp.n:
            raise ValueError(f"check degree {self.K} != component length {self.comp.n}")
        if self.J != 2:
            raise ValueError("the degree-2 variable recursion assumes J = 2")


def de_check_mix(x: float, ens: DeEnsemble) -> float:
    """Probability an outgoing check message stays erased at input erasure x.

    Plain checks: 1 - (1-x)^(K-1).  Generalized checks: the component
    code's exact position-averaged non-recoverability with the target
    position excluded (every other position erased independently w.p. x).
    """
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"erasure probability {x} outside [0, 1]")
    nu = float(ens.nu)
    f_spc = 1.0 - (1.0 - x) ** (ens.K - 1)
    f_gc = ens.comp.exit_erasure(x) if nu > 0.0 else 0.0
    return nu * f_gc + (1.0 - nu) * f_spc


def de_converges(eps: float, ens: DeEnsemble,
                 converged_below: float = CONVERGED_BELOW,
                 cap: int = ITERATION_CAP) -> bool:
    """Run the recursion x <- eps * de_check_mix(x) from x = eps.

    True when x falls below the convergence criterion.  A stall at a
    positive fixed point is failure; so is exhausting the iteration cap
    while still (monotonically) creeping down, which is reported as
    failure conservatively.  Non-monotone trajectories indicate a broken
    mixture function and raise.
    """
    x = eps
    for _ in range(cap):
        if x < converged_below:
            return True
        x_next = eps * de_check_mix(x, ens)
        if x_next >= x:
            if x_next > x:
                raise RuntimeError(
                    f"density evolution not monotone at eps={eps}: {x} -> {x_next}")
            return False  # exact positive fixed point
        x = x_next
    return x < converged_below


def de_threshold(ens: DeEnsemble, tol: float = 1e-4) -> float:
    """Largest erasure probability the ensemble decodes, by bisection.

    Maintains an invariant bracket (lo always converges, hi never) and
    returns the midpoint once the bracket is narrower than tol.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    lo, hi = 0.0, 1.0
    if de_converges(hi, ens):
        return 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if de_converges(mid, ens):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rate_threshold_sweep(nu_grid, J: int = 2, K: int = 6,
                         comp: ComponentCode | None = None,
                         tol: float = 1e-4) -> list:
    """Threshold and gap-to-capacity for each nu on the grid.

    Returns rows of dicts: nu, design_rate, threshold, gap where
    gap = (1 - design_rate) - threshold (BEC capacity shortfall).
    """
    comp = comp if comp is not None else default_component_code()
    rows = []
    for nu in nu_grid:
        ens = DeEnsemble(J=J, K=K, nu=float(nu), comp=comp)
        rate = design_rate(J, K, Fraction(nu).limit_denominator(10**9), comp.k)
        eps_star = de_threshold(ens, tol=tol)
        rows.append({
            "nu": float(nu),
            "design_rate": rate,
            "threshold": eps_star,
            "gap": float(1 - rate) - eps_star,
        })
    return rows
