"""Exact discrete phase search by reflected mixed-radix Gray enumeration.

Visiting the L^N phase tuples in Gray order changes a single element per
step, so both effective-gain accumulators are updated in O(1) per candidate
instead of O(N). The accumulators are rebuilt from scratch periodically to
keep rounding drift bounded.
"""

from __future__ import annotations

import numpy as np

from .secrecy import CascadeVectors, DiscretePhaseSet, PhaseVector

DEFAULT_CAP = 10_000_000
_RESYNC_EVERY = 65536


def exhaustive_search(cascades: CascadeVectors, phase_set: DiscretePhaseSet,
                      cap: int = DEFAULT_CAP) -> tuple[PhaseVector, float]:
    """Globally maximize the secrecy ratio over the discrete phase grid.

    Refuses instances with more than cap candidates. Returns the best phase
    profile and its ratio objective; exact ties go to the lexicographically
    smallest level tuple.
    """
    n = int(cascades.bob.size)
    lp = phase_set.num_levels
    total = lp ** n
    if total > cap:
        raise ValueError(
            f"{lp}^{n} = {total} candidates exceeds cap {cap}; "
            "reduce the element count or the number of levels"
        )

    phases = phase_set.values
    levels_unit = np.exp(1j * phases)
    # contribution tables: element j at level l adds contrib[j][l]
    contrib_bob = [[complex(u * x) for u in levels_unit] for x in cascades.bob]
    contrib_eve = [[complex(u * x) for u in levels_unit] for x in cascades.eve]
    offset = complex(cascades.eve_offset)
    nb = cascades.noise_bob
    ne = cascades.noise_eve

    # loopless reflected mixed-radix Gray state
    a = [0] * n
    f = list(range(n + 1))
    o = [1] * n

    e_bob = sum(row[0] for row in contrib_bob)
    e_eve = sum(row[0] for row in contrib_eve) + offset

    def ratio(eb, ee):
        return (1.0 + (eb.real * eb.real + eb.imag * eb.imag) / nb) / (
            1.0 + (ee.real * ee.real + ee.imag * ee.imag) / ne
        )

    best = ratio(e_bob, e_eve)
    best_levels = list(a)
    visited = 1
    while True:
        j = f[0]
        f[0] = 0
        if j == n:
            break
        old = a[j]
        new = old + o[j]
        a[j] = new
        if new == 0 or new == lp - 1:
            o[j] = -o[j]
            f[j] = f[j + 1]
            f[j + 1] = j + 1
        e_bob += contrib_bob[j][new] - contrib_bob[j][old]
        e_eve += contrib_eve[j][new] - contrib_eve[j][old]
        visited += 1
        if visited % _RESYNC_EVERY == 0:
            e_bob = sum(row[lev] for row, lev in zip(contrib_bob, a))
            e_eve = sum(row[lev] for row, lev in zip(contrib_eve, a)) + offset
        obj = ratio(e_bob, e_eve)
        if obj > best:
            best = obj
            best_levels = list(a)
        elif obj == best and a < best_levels:
            best_levels = list(a)

    assert visited == total
    thetas = phases[np.asarray(best_levels)]
    return PhaseVector(thetas, phase_set), float(best)
