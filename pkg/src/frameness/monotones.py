"""Frameness measures and randomized monotonicity audits.

Measures (logarithms are base 2 throughout):

* Z2 chirality  C = 2 min(p0, p1) and the asymptotic measure
  F_inf = -log2|p0 - p1| (infinite exactly on the degenerate state).
* U1 scaled number variance  V = 4 (<n^2> - <n>^2).
* SU2 scaled j-mean  M = 2 <J> and scaled j-variance V = 4 (<J^2> - <J>^2),
  normalized so the unit resource (|0,0> + |1,1>)/sqrt(2) has M = V = 1.

The audit machinery samples random (state, trace-preserving invariant
channel) pairs and checks that the claimed ensemble monotones never increase
on average; for Z2 it also reproduces the constructed counterexample showing
that F_inf, despite being the unique asymptotic measure, is not an ensemble
monotone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import config
from .channels import KrausChannel, apply, build_diagonal_channel
from .errors import AuditFailed, SsrMismatch
from .singlecopy import StochasticFragment, stochastic_monotones
from .states import Ssr, WeightState, normalize


def chirality(s: WeightState) -> float:
    """2 min(p0, p1); ranges over [0, 1] with 1 on the degenerate state."""
    if s.ssr is not Ssr.Z2:
        raise SsrMismatch("chirality is a Z2 measure")
    return 2.0 * min(s.weight(0), s.weight(1))


def z2_asymptotic(s: WeightState) -> float:
    """-log2 |p0 - p1|, with +inf on the degenerate state.

    The infinity is genuine: the degenerate state lifts the restriction
    entirely, and the measure is discontinuous there by construction.
    """
    if s.ssr is not Ssr.Z2:
        raise SsrMismatch("the asymptotic chirality measure is a Z2 quantity")
    gap = abs(s.weight(0) - s.weight(1))
    if gap <= config.tolerance():
        return math.inf
    return -math.log2(gap)


def number_variance(s: WeightState) -> float:
    """Scaled number variance 4 (<n^2> - <n>^2)."""
    if s.ssr is not Ssr.U1:
        raise SsrMismatch("number variance is a U1 measure")
    mean = sum(n * w for n, w in s.weights.items())
    second = sum(n * n * w for n, w in s.weights.items())
    return 4.0 * (second - mean * mean)


def j_mean(s: WeightState) -> float:
    """Scaled j-mean 2 <J> (equal to the mean twice-j label)."""
    if s.ssr is not Ssr.SU2:
        raise SsrMismatch("j-mean is an SU2 measure")
    return sum(t * w for t, w in s.weights.items())


def j_variance(s: WeightState) -> float:
    """Scaled j-variance 4 (<J^2> - <J>^2) (variance of the twice-j label)."""
    if s.ssr is not Ssr.SU2:
        raise SsrMismatch("j-variance is an SU2 measure")
    mean = sum(t * w for t, w in s.weights.items())
    second = sum(t * t * w for t, w in s.weights.items())
    return second - mean * mean


@dataclass(frozen=True)
class MonotoneReport:
    """Every measure applicable to one state under its SSR."""

    ssr: Ssr
    stochastic: StochasticFragment
    chirality: float | None = None
    f_infinity: float | None = None
    variance: float | None = None
    mean: float | None = None

    def to_json(self) -> dict:
        out: dict = {"ssr": self.ssr.value, "stochastic": self.stochastic.to_json()}
        if self.chirality is not None:
            out["chirality"] = self.chirality
        if self.f_infinity is not None:
            out["f_infinity"] = "inf" if math.isinf(self.f_infinity) else self.f_infinity
        if self.variance is not None:
            out["variance"] = self.variance
        if self.mean is not None:
            out["mean"] = self.mean
        return out


def report(s: WeightState) -> MonotoneReport:
    fragment = stochastic_monotones(s)
    if s.ssr is Ssr.Z2:
        return MonotoneReport(
            s.ssr, fragment, chirality=chirality(s), f_infinity=z2_asymptotic(s)
        )
    if s.ssr is Ssr.U1:
        return MonotoneReport(s.ssr, fragment, variance=number_variance(s))
    return MonotoneReport(s.ssr, fragment, variance=j_variance(s), mean=j_mean(s))


# ---------------------------------------------------------------------------
# Randomized audits


def _random_state(rng: np.random.Generator, ssr: Ssr) -> WeightState:
    if ssr is Ssr.Z2:
        labels = [0, 1]
    else:
        width = int(rng.integers(2, 7))
        base = int(rng.integers(0, 5))
        labels = sorted(rng.choice(np.arange(base, base + 10), size=width, replace=False))
    raw = {int(l): float(w) for l, w in zip(labels, rng.dirichlet(np.ones(len(labels))))}
    return normalize(raw, ssr)


def _random_tp_channel(rng: np.random.Generator, ssr: Ssr, labels: list[int]) -> KrausChannel:
    """Random trace-preserving invariant channel covering the given labels."""
    if ssr is Ssr.Z2:
        shifts = [0, 1] if rng.random() < 0.7 else [0, 0, 1]
    elif ssr is Ssr.U1:
        count = int(rng.integers(1, 4))
        shifts = [0] + [int(rng.integers(-3, 4)) for _ in range(count)]
    else:
        count = int(rng.integers(1, 4))
        shifts = [0] + [-int(rng.integers(0, 5)) for _ in range(count)]
    profiles: list[dict[int, complex]] = [{} for _ in shifts]
    for label in labels:
        legal = [
            i
            for i, shift in enumerate(shifts)
            if ssr is Ssr.Z2 or label + shift >= 0
        ]
        split = rng.dirichlet(np.ones(len(legal)))
        for i, q in zip(legal, split):
            if q > 1e-12:
                profiles[i][label] = math.sqrt(float(q))
    ops = [(shift, prof) for shift, prof in zip(shifts, profiles) if prof]
    return build_diagonal_channel(ssr, ops)


def audit_counterexample_z2() -> dict:
    """Constructed instance where average F_inf strictly increases.

    Measuring toward the degenerate branch with the max-probability protocol
    sends part of the ensemble to the state with infinite F_inf, so the
    ensemble average exceeds any finite starting value.
    """
    source = normalize({0: 0.7, 1: 0.3}, Ssr.Z2)
    p0, p1 = source.weight(0), source.weight(1)
    x = math.sqrt(p1 / p0)  # target |+>: q0 = q1 = 1/2
    channel = build_diagonal_channel(
        Ssr.Z2,
        [
            (0, {0: x, 1: 1.0}),
            (0, {0: math.sqrt(1.0 - x * x)}),
        ],
    )
    before = z2_asymptotic(source)
    branches = apply(channel, source)
    average = sum(w * z2_asymptotic(state) for w, state in branches)
    if not average > before:
        raise AuditFailed("constructed counterexample failed to increase F_inf")
    return {
        "state": source.to_json(),
        "channel": channel.to_json(),
        "f_infinity_before": before,
        "average_f_infinity_after": "inf" if math.isinf(average) else average,
    }


def monotonicity_audit(ssr: Ssr | str, trials: int, seed: int) -> dict:
    """Randomized ensemble-monotonicity audit.

    Each trial draws a state and a trace-preserving invariant channel and
    checks sum_mu w_mu F(phi_mu) <= F(psi) + 1e-9 for every claimed ensemble
    monotone (chirality for Z2, variance for U1, mean and variance for SU2).
    Raises :class:`AuditFailed` with the violating instance serialized; for
    Z2 the report also carries the F_inf counterexample.
    """
    ssr = Ssr.coerce(ssr)
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    if ssr is Ssr.Z2:
        measures = {"chirality": chirality}
    elif ssr is Ssr.U1:
        measures = {"variance": number_variance}
    else:
        measures = {"mean": j_mean, "variance": j_variance}
    slack = 1e-9
    checked = 0
    for _ in range(trials):
        state = _random_state(rng, ssr)
        channel = _random_tp_channel(rng, ssr, list(state.support()))
        branches = apply(channel, state)
        checked += 1
        for name, measure in measures.items():
            average = sum(w * measure(phi) for w, phi in branches)
            if average > measure(state) + slack:
                raise AuditFailed(
                    f"{name} increased on average: {measure(state)!r} -> {average!r} "
                    f"for state {state} under channel {channel.to_json()}"
                )
    out = {
        "ssr": ssr.value,
        "trials": checked,
        "seed": seed,
        "violations": 0,
        "monotones": sorted(measures),
    }
    if ssr is Ssr.Z2:
        out["f_infinity_counterexample"] = audit_counterexample_z2()
    return out
