import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from d2dlan import FormationGraph, PowerConstants, RadioConfig, Topology

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def radio():
    return RadioConfig()


@pytest.fixture
def power():
    return PowerConstants()


def gain_topology(gain_lr, gain_sr, radio=None, area=400.0):
    """Topology with explicit gains; positions are placeholders on a line."""
    k = len(gain_lr)
    positions = np.column_stack([np.linspace(10.0, area - 10.0, k),
                                 np.full(k, area / 2.0)])
    sr = np.asarray(gain_sr, dtype=float)
    return Topology(
        bs_position=np.array([area / 2.0, area / 2.0]),
        mu_positions=positions,
        gain_lr=np.asarray(gain_lr, dtype=float),
        gain_sr=sr,
        radio=radio if radio is not None else RadioConfig(),
    )


def symmetric_gain_matrix(k, pairs):
    """Build a K x K symmetric gain matrix from {(i, j): gain} entries."""
    sr = np.zeros((k, k))
    for (i, j), g in pairs.items():
        sr[i, j] = g
        sr[j, i] = g
    return sr


def star(seed, k):
    return FormationGraph.from_parents(
        seed, [None if x == seed else seed for x in range(k)])


def chain(nodes, k):
    """Rooted path: nodes[0] is the seed; MUs outside nodes stay unconnected."""
    parents = [None] * k
    for prev, node in zip(nodes, nodes[1:]):
        parents[node] = prev
    return FormationGraph.from_parents(nodes[0], parents)
