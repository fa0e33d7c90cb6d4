"""Role-based per-slot energy accounting.

Power draw is constant per link type (rate-adaptive hardware keeps it nearly
flat), so each MU's energy in a slot is its role's Watt rate times the time
it holds that role. Baseline: downloading directly on the cellular link for
the whole slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .formation import FormationGraph

RHO_SUM_TOL = 1e-9


@dataclass(frozen=True)
class PowerConstants:
    p_rx_lr: float = 1.8       # W, cellular reception
    p_rx_sr: float = 0.925     # W, device-to-device reception
    p_tx_sr: float = 1.425     # W, device-to-device transmission
    slot_duration: float = 1.0  # s

    def __post_init__(self) -> None:
        if min(self.p_rx_lr, self.p_rx_sr, self.p_tx_sr) <= 0:
            raise ValueError("power draws must be positive")
        if self.slot_duration < 0:
            raise ValueError("slot_duration must be nonnegative")


@dataclass(frozen=True)
class EnergyReport:
    """Per-MU energy under the baseline and the scheduled-tree scenario,
    with the per-tree decomposition (row k, column m: energy MU k spends
    while MU m's tree is active)."""

    per_mu_multicast: np.ndarray        # (K,) J
    per_mu_d2d: np.ndarray              # (K,) J
    per_graph_contribution: np.ndarray  # (K, K) J

    def __post_init__(self) -> None:
        base = np.asarray(self.per_mu_multicast, dtype=float)
        d2d = np.asarray(self.per_mu_d2d, dtype=float)
        contrib = np.asarray(self.per_graph_contribution, dtype=float)
        k = base.shape[0]
        if d2d.shape != (k,) or contrib.shape != (k, k):
            raise ValueError("inconsistent report shapes")
        if np.any(base < 0) or np.any(d2d < 0) or np.any(contrib < 0):
            raise ValueError("energies must be nonnegative")
        if not np.allclose(contrib.sum(axis=1), d2d, rtol=0, atol=1e-9):
            raise ValueError("per_mu_d2d must equal row sums of the decomposition")
        for name, arr in (("per_mu_multicast", base), ("per_mu_d2d", d2d),
                          ("per_graph_contribution", contrib)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)


def multicast_energy(constants: PowerConstants) -> float:
    """Energy of one full slot of cellular reception."""
    return constants.p_rx_lr * constants.slot_duration


def role_power(mu: int, graph: FormationGraph, constants: PowerConstants) -> float:
    """Watt rate of ``mu``'s role while ``graph`` is active.

    Seed with children: cellular reception plus SR transmission. Childless
    seed: cellular reception only (nobody to forward to). Relay: SR reception
    plus SR transmission. Sink: SR reception. An MU left out of the tree
    falls back to its own cellular download.
    """
    if mu == graph.seed:
        if graph.children[mu]:
            return constants.p_rx_lr + constants.p_tx_sr
        return constants.p_rx_lr
    if not graph.connected[mu]:
        return constants.p_rx_lr
    if graph.children[mu]:
        return constants.p_rx_sr + constants.p_tx_sr
    return constants.p_rx_sr


def role_energy(mu: int, graph: FormationGraph, rho_seed: float,
                constants: PowerConstants) -> float:
    """Energy MU spends during the fraction ``rho_seed`` of the slot in
    which ``graph`` is active."""
    if not 0.0 <= rho_seed <= 1.0:
        raise ValueError("rho_seed must lie in [0, 1]")
    return role_power(mu, graph, constants) * rho_seed * constants.slot_duration


def total_d2d_energy(mu: int, graphs: Sequence[FormationGraph],
                     rho: Sequence[float], constants: PowerConstants) -> float:
    """Slot energy of one MU when each MU m seeds its own tree for rho[m]."""
    if len(graphs) != len(rho):
        raise ValueError("graphs and rho must have equal length")
    if abs(sum(rho) - 1.0) > RHO_SUM_TOL:
        raise ValueError("seed-time fractions must sum to 1")
    return sum(role_energy(mu, g, r, constants) for g, r in zip(graphs, rho))


def energy_report(graphs: Sequence[FormationGraph], rho: Sequence[float],
                  constants: PowerConstants) -> EnergyReport:
    k = len(graphs)
    if len(rho) != k:
        raise ValueError("graphs and rho must have equal length")
    if abs(sum(rho) - 1.0) > RHO_SUM_TOL:
        raise ValueError("seed-time fractions must sum to 1")
    contrib = np.zeros((k, k))
    for m, (graph, r) in enumerate(zip(graphs, rho)):
        for mu in range(k):
            contrib[mu, m] = role_energy(mu, graph, r, constants)
    base = np.full(k, multicast_energy(constants))
    return EnergyReport(per_mu_multicast=base,
                        per_mu_d2d=contrib.sum(axis=1),
                        per_graph_contribution=contrib)
