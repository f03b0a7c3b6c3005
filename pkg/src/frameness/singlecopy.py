"""Single-copy convertibility: deterministic, stochastic, and max-probability.

Shift conventions (they differ between the deterministic and stochastic
results, mirroring how the source literature states them):

* Deterministic certificates are keyed by the offset ``k`` that moves the
  target spectrum up into the source spectrum: ``supp(q) + k <= supp(p)`` and
  ``p_n = sum_k w_k q_{n-k}``.  For SU2 the offsets are restricted to k >= 0
  (twice-J units) because stretch labels only shift downward.

* Stochastic shift lists use the transformation direction: U1 reports ``k``
  with ``Spec(phi) in Spec(psi) + k`` (the applied Kraus shift, either sign);
  SU2 reports the downward shift ``J >= 0`` with
  ``j-Spec(phi) in j-Spec(psi) - J``.  Z2 resources are always mutually
  reachable, with both parity shifts admissible.

All SU2 quantities are in twice-j integer units.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import config, simplex
from .channels import DiagonalKraus, KrausChannel, build_diagonal_channel, compose_diagonal
from .errors import MonotoneViolated, NotAResource, SsrMismatch
from .states import Ssr, WeightState, is_resource

_AXIS_WITNESS = "different quantization axes are never interconvertible"


@dataclass(frozen=True)
class FeasibilityCertificate:
    feasible: bool
    shift_weights: dict[int, float] | None = None
    realizing_channel: KrausChannel | None = None
    witness: str | None = None

    def to_json(self) -> dict:
        out: dict = {"feasible": self.feasible}
        if self.shift_weights is not None:
            out["shift_weights"] = {str(k): w for k, w in sorted(self.shift_weights.items())}
        if self.realizing_channel is not None:
            out["channel"] = self.realizing_channel.to_json()
        if self.witness is not None:
            out["witness"] = self.witness
        return out


class MaxProbMethod(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    LP_EXTENSION = "LpExtension"


@dataclass(frozen=True)
class MaxProbResult:
    probability: float
    method: MaxProbMethod
    per_shift_weights: dict[int, float]

    def to_json(self) -> dict:
        return {
            "probability": self.probability,
            "method": self.method.value,
            "per_shift_weights": {str(k): w for k, w in sorted(self.per_shift_weights.items())},
        }


def _check_pair(source: WeightState, target: WeightState) -> bool:
    """Common preconditions; returns True when the axes are compatible."""
    if source.ssr is not target.ssr:
        raise SsrMismatch(f"{source.ssr.value} versus {target.ssr.value}")
    if not is_resource(source):
        raise NotAResource("source is preparable under the SSR")
    if not is_resource(target):
        raise NotAResource("target is preparable under the SSR")
    if (
        source.ssr is Ssr.SU2
        and source.axis is not None
        and target.axis is not None
        and source.axis != target.axis
    ):
        return False
    return True


def _det_candidates(source: WeightState, target: WeightState) -> list[int]:
    p = source.support()
    q = target.support()
    lo, hi = p[0] - q[0], p[-1] - q[-1]
    if source.ssr is Ssr.SU2:
        lo = max(lo, 0)
    p_set = set(p)
    return [k for k in range(lo, hi + 1) if all(n + k in p_set for n in q)]


def det_feasible(source: WeightState, target: WeightState) -> FeasibilityCertificate:
    """Decide deterministic convertibility and synthesize a realizing channel.

    Z2 reduces to a 2x2 linear solve for the parity-branch weights (feasible
    exactly when the chirality does not increase); U1 and SU2 solve the
    convex-shift feasibility problem by phase-1 simplex over the finite
    candidate-shift set.
    """
    if not _check_pair(source, target):
        return FeasibilityCertificate(False, witness=_AXIS_WITNESS)
    if source.ssr is Ssr.Z2:
        return _det_z2(source, target)
    return _det_shiftable(source, target)


def _det_z2(source: WeightState, target: WeightState) -> FeasibilityCertificate:
    tol = config.tolerance()
    p0, p1 = source.weight(0), source.weight(1)
    q0, q1 = target.weight(0), target.weight(1)
    if abs(q0 - q1) <= tol:
        # degenerate target |+>: reachable only from |+>
        if abs(p0 - p1) <= tol:
            weights = {0: 1.0, 1: 0.0}
        else:
            return FeasibilityCertificate(
                False, witness=f"chirality would increase: {2*min(p0,p1):.9f} -> 1"
            )
    else:
        w0 = (p0 * q0 - p1 * q1) / (q0 * q0 - q1 * q1)
        w1 = (p1 * q0 - p0 * q1) / (q0 * q0 - q1 * q1)
        if min(w0, w1) < -tol:
            return FeasibilityCertificate(
                False,
                witness=(
                    "chirality would increase: "
                    f"{2*min(p0,p1):.9f} -> {2*min(q0,q1):.9f}"
                ),
            )
        weights = {0: max(w0, 0.0), 1: max(w1, 0.0)}
    ops = []
    for b_shift, w in weights.items():
        if w <= tol:
            continue
        profile = {}
        for b in (0, 1):
            pb = source.weight(b)
            if pb > 0.0:
                profile[b] = np.sqrt(w * target.weight((b + b_shift) % 2) / pb)
        ops.append((b_shift, profile))
    channel = build_diagonal_channel(Ssr.Z2, ops)
    return FeasibilityCertificate(True, weights, channel)


def _det_shiftable(source: WeightState, target: WeightState) -> FeasibilityCertificate:
    tol = config.tolerance()
    candidates = _det_candidates(source, target)
    if not candidates:
        return FeasibilityCertificate(
            False, witness="no shift places the target spectrum inside the source spectrum"
        )
    p_labels = source.support()
    a_eq = np.array(
        [[target.weight(n - k) for k in candidates] for n in p_labels], dtype=float
    )
    b_eq = np.array([source.weight(n) for n in p_labels], dtype=float)
    solution = simplex.feasible_combination(a_eq, b_eq)
    if solution is None:
        return FeasibilityCertificate(
            False,
            witness="source weights are not a convex combination of shifted target weights",
        )
    weights = {k: float(w) for k, w in zip(candidates, solution) if w > tol}
    ops = []
    for k, w in weights.items():
        profile = {}
        for n in p_labels:
            q = target.weight(n - k)
            if q > 0.0:
                profile[n] = np.sqrt(w * q / source.weight(n))
        ops.append((-k, profile))
    channel = build_diagonal_channel(source.ssr, ops)
    return FeasibilityCertificate(True, weights, channel)


def stoch_feasible(source: WeightState, target: WeightState) -> tuple[bool, list[int]]:
    """All admissible shifts for a nonzero-probability conversion."""
    if not _check_pair(source, target):
        return False, []
    if source.ssr is Ssr.Z2:
        return True, [0, 1]
    p = set(source.support())
    q = target.support()
    if source.ssr is Ssr.U1:
        lo = q[-1] - max(p)
        hi = q[0] - min(p)
        shifts = [k for k in range(lo, hi + 1) if all(n - k in p for n in q)]
    else:
        lo = max(0, min(p) - q[0])
        hi = max(p) - q[-1]
        shifts = [j for j in range(lo, hi + 1) if all(n + j in p for n in q)]
    return bool(shifts), shifts


def _single_shift_prob(source: WeightState, target: WeightState, offset: int) -> float:
    """min over the target support of p_{t+offset} / q_t (offset in det units)."""
    ratio = min(
        source.weight(t + offset) / w for t, w in target.weights.items()
    )
    return min(1.0, ratio)


def max_prob(source: WeightState, target: WeightState) -> MaxProbResult:
    """Maximum conversion probability.

    Z2 and the single-admissible-shift U1/SU2 cases use the closed forms; with
    several admissible shifts the result is the optimum of a small linear
    program (method LpExtension).  The multi-shift optimum is open in the
    source theory, so the LP value is an artifact-level answer validated
    against the single-shift theorem, the additivity lower bound, and a
    brute-force oracle; the method tag keeps that provenance explicit.
    """
    if not _check_pair(source, target):
        return MaxProbResult(0.0, MaxProbMethod.CLOSED_FORM, {})
    if source.ssr is Ssr.Z2:
        c_source = 2.0 * min(source.weight(0), source.weight(1))
        c_target = 2.0 * min(target.weight(0), target.weight(1))
        return MaxProbResult(
            min(1.0, c_source / c_target), MaxProbMethod.CLOSED_FORM, {}
        )
    ok, shifts = stoch_feasible(source, target)
    if not ok:
        return MaxProbResult(0.0, MaxProbMethod.CLOSED_FORM, {})
    if len(shifts) == 1:
        shift = shifts[0]
        offset = -shift if source.ssr is Ssr.U1 else shift
        prob = _single_shift_prob(source, target, offset)
        return MaxProbResult(prob, MaxProbMethod.CLOSED_FORM, {shift: prob})
    offsets = [-s if source.ssr is Ssr.U1 else s for s in shifts]
    p_labels = source.support()
    a_ub = np.array(
        [[target.weight(n - k) for k in offsets] for n in p_labels], dtype=float
    )
    b_ub = np.array([source.weight(n) for n in p_labels], dtype=float)
    solution, value = simplex.maximize(np.ones(len(offsets)), a_ub, b_ub)
    weights = {
        shift: float(w)
        for shift, w in zip(shifts, solution)
        if w > config.tolerance()
    }
    return MaxProbResult(min(1.0, float(value)), MaxProbMethod.LP_EXTENSION, weights)


def synthesize_ensemble_z2(
    source: WeightState, targets: list[tuple[float, WeightState]]
) -> KrausChannel:
    """Channel realizing |psi> -> {(w_mu, |phi_mu>)} when chirality permits.

    Composes the deterministic channel onto the chirality-averaged state with
    the measurement splitting it into the requested ensemble (plus a parity
    flip for targets given with the odd label dominant).  Raises
    :class:`MonotoneViolated` when the average chirality would increase.
    """
    tol = config.tolerance()
    if source.ssr is not Ssr.Z2 or any(t.ssr is not Ssr.Z2 for _, t in targets):
        raise SsrMismatch("ensemble synthesis is a Z2 construction")
    total = sum(w for w, _ in targets)
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"ensemble weights sum to {total}, expected 1")
    c_source = 2.0 * min(source.weight(0), source.weight(1))
    c_average = sum(w * 2.0 * min(t.weight(0), t.weight(1)) for w, t in targets)
    if c_average > c_source + tol:
        raise MonotoneViolated(
            f"average chirality {c_average:.9f} exceeds source chirality {c_source:.9f}"
        )

    t1 = sum(w * min(t.weight(0), t.weight(1)) for w, t in targets)
    t0 = 1.0 - t1
    p0, p1 = source.weight(0), source.weight(1)
    if abs(t0 - t1) <= tol:
        branch_weights = {0: 1.0, 1: 0.0}
    else:
        w0 = (p0 * t0 - p1 * t1) / (t0 * t0 - t1 * t1)
        branch_weights = {0: min(max(w0, 0.0), 1.0)}
        branch_weights[1] = 1.0 - branch_weights[0]
    det_ops = []
    for b_shift, w in branch_weights.items():
        if w <= tol:
            continue
        profile = {}
        t_of = {0: t0, 1: t1}
        for b in (0, 1):
            pb = source.weight(b)
            if pb > 0.0:
                profile[b] = np.sqrt(w * t_of[(b + b_shift) % 2] / pb)
        det_ops.append(DiagonalKraus(b_shift, profile))

    measurement_ops = []
    for w_mu, phi in targets:
        hi, lo = max(phi.weight(0), phi.weight(1)), min(phi.weight(0), phi.weight(1))
        flip = 1 if phi.weight(1) > phi.weight(0) else 0
        profile = {}
        if t0 > tol and hi > 0.0:
            profile[0] = np.sqrt(w_mu * hi / t0)
        if t1 > tol and lo > 0.0:
            profile[1] = np.sqrt(w_mu * lo / t1)
        measurement_ops.append(DiagonalKraus(flip, profile))

    composite = []
    for m_op in measurement_ops:
        for d_op in det_ops:
            product = compose_diagonal(m_op, d_op, Ssr.Z2)
            if product.profile:
                composite.append((product.shift, product.profile))
    return build_diagonal_channel(Ssr.Z2, composite)


@dataclass(frozen=True)
class StochasticFragment:
    """Spectrum-derived stochastic monotones of one state."""

    cardinality: int
    differences: tuple[int, ...]
    mons: tuple[int, ...]
    j_max: int | None = None

    def to_json(self) -> dict:
        out = {
            "cardinality": self.cardinality,
            "differences": list(self.differences),
            "mons": list(self.mons),
        }
        if self.j_max is not None:
            out["j_max"] = self.j_max
        return out


def stochastic_monotones(s: WeightState) -> StochasticFragment:
    """Spectrum cardinality and the descending difference monotones.

    The i-th difference is n_{S-i+1} - n_1 (largest-minus-smallest first);
    Mons is the set of the nonzero-index ones.  For SU2 the largest label is
    itself a monotone (labels only shift downward) and is reported as j_max;
    for Z2 only the chiral spectrum cardinality is meaningful.  SU2 entries
    are in twice-j units.
    """
    labels = s.support()
    card = len(labels)
    if s.ssr is Ssr.Z2:
        return StochasticFragment(card, (), ())
    diffs = tuple(labels[card - 1 - i] - labels[0] for i in range(card - 1))
    j_max = labels[-1] if s.ssr is Ssr.SU2 else None
    return StochasticFragment(card, diffs, diffs, j_max)


def majorizes(q: WeightState, p: WeightState) -> bool:
    """True iff the q weights majorize the p weights (sorted prefix sums)."""
    a = sorted(p.weights.values(), reverse=True)
    b = sorted(q.weights.values(), reverse=True)
    size = max(len(a), len(b))
    a += [0.0] * (size - len(a))
    b += [0.0] * (size - len(b))
    run_a = run_b = 0.0
    for x, y in zip(a, b):
        run_a += x
        run_b += y
        if run_a > run_b + 1e-9:
            return False
    return True
