"""Shared generators for randomized tests."""

import numpy as np

from frameness import Ssr, WeightState, normalize


def rand_state(rng, ssr, max_support=6, label_range=12) -> WeightState:
    ssr = Ssr.coerce(ssr)
    if ssr is Ssr.Z2:
        labels = [0, 1]
    else:
        width = int(rng.integers(2, max_support + 1))
        labels = sorted(
            int(x) for x in rng.choice(label_range, size=width, replace=False)
        )
    weights = rng.dirichlet(np.ones(len(labels)) * 2.0)
    return normalize({l: float(w) for l, w in zip(labels, weights)}, ssr)


def rand_det_feasible_pair(rng, ssr, max_support=5) -> tuple[WeightState, WeightState]:
    """Source built as a convex mix of shifted copies of the target."""
    ssr = Ssr.coerce(ssr)
    target = rand_state(rng, ssr, max_support=max_support, label_range=8)
    count = int(rng.integers(1, 4))
    if ssr is Ssr.Z2:
        shifts = sorted(int(x) for x in rng.integers(0, 2, size=count))
    elif ssr is Ssr.SU2:
        shifts = sorted(int(x) for x in rng.integers(0, 5, size=count))
    else:
        shifts = sorted(int(x) for x in rng.integers(0, 7, size=count))
    mix = rng.dirichlet(np.ones(len(shifts)))
    raw: dict[int, float] = {}
    for shift, w in zip(shifts, mix):
        for label, q in target.weights.items():
            out = (label + shift) % 2 if ssr is Ssr.Z2 else label + shift
            raw[out] = raw.get(out, 0.0) + w * q
    return normalize(raw, ssr), target


def grouped_branches(branches, tol=1e-8):
    """Aggregate (weight, state) branches whose states coincide."""
    groups: list[tuple[float, object]] = []
    for w, state in branches:
        for i, (total, rep) in enumerate(groups):
            if rep.close_to(state, tol):
                groups[i] = (total + w, rep)
                break
        else:
            groups.append((w, state))
    return groups
