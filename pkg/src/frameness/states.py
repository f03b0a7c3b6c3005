"""Standard-form pure resource states for each superselection rule.

A pure state is reduced to a sparse map from charge label to weight (the
squared amplitude); invariant unitaries remove all phases, so the weight
vector is the whole story.  Charge labels are stored as plain integers:

* Z2   -- the parity bit, 0 or 1;
* U1   -- the excitation number n >= 0;
* SU2  -- twice the angular momentum, 2j >= 0 (exact half-integers).

SU2 states live on the span of stretch states |j,j> for one quantization
axis; the axis is carried as an opaque string label because invariant maps
can never connect different axes.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from typing import Iterable, Mapping

from . import config
from .errors import EmptyState, NegativeWeight, SsrMismatch
from .wigner import HalfInt


class Ssr(enum.Enum):
    """The three superselection rules covered by the library."""

    Z2 = "z2"
    U1 = "u1"
    SU2 = "su2"

    @staticmethod
    def coerce(value: "Ssr | str") -> "Ssr":
        if isinstance(value, Ssr):
            return value
        return Ssr(str(value).lower())

    @property
    def label_step(self) -> int:
        """Gap between adjacent charge labels in internal units."""
        return 2 if self is Ssr.SU2 else 1


@dataclass(frozen=True)
class Spectrum:
    """Ascending support labels of a state and their count."""

    labels: tuple[int, ...]
    cardinality: int


@dataclass(frozen=True)
class WeightState:
    """Normalized sparse weight vector over charge labels.

    Instances are immutable value objects; construct them with
    :func:`normalize` (or :func:`from_json`) rather than by hand unless the
    weights are already clean.
    """

    ssr: Ssr
    weights: dict[int, float]
    axis: str | None = None

    def __post_init__(self):
        if self.ssr is not Ssr.SU2 and self.axis is not None:
            raise ValueError("axis metadata only applies to SU2 states")
        if not self.weights:
            raise EmptyState("state has no support")
        for label, w in self.weights.items():
            if w <= 0:
                raise ValueError(f"nonpositive weight {w} at label {label}")
            if label < 0:
                raise ValueError(f"negative charge label {label}")
            if self.ssr is Ssr.Z2 and label not in (0, 1):
                raise ValueError(f"Z2 label must be 0 or 1, got {label}")
        total = sum(self.weights.values())
        if abs(total - 1.0) > 1e-9 + config.tolerance():
            raise ValueError(f"weights sum to {total}, expected 1")

    def support(self) -> tuple[int, ...]:
        return tuple(sorted(self.weights))

    def weight(self, label: int) -> float:
        return self.weights.get(label, 0.0)

    def j_values(self) -> tuple[HalfInt, ...]:
        """Support as exact half-integers (SU2 only)."""
        if self.ssr is not Ssr.SU2:
            raise SsrMismatch("j_values is defined for SU2 states")
        return tuple(HalfInt(t) for t in self.support())

    def close_to(self, other: "WeightState", tol: float = 1e-9) -> bool:
        if self.ssr is not other.ssr:
            return False
        labels = set(self.weights) | set(other.weights)
        return all(abs(self.weight(l) - other.weight(l)) <= tol for l in labels)

    def to_json(self) -> dict:
        out = {
            "ssr": self.ssr.value,
            "weights": {str(l): self.weights[l] for l in self.support()},
        }
        if self.axis is not None:
            out["axis"] = self.axis
        return out

    def __str__(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def normalize(
    raw: Mapping[int, float], ssr: Ssr | str, axis: str | None = None
) -> WeightState:
    """Canonicalize a raw weight map into a standard-form state.

    Entries at or below the global zero threshold are dropped and the rest
    rescaled to sum to one.  Raises :class:`NegativeWeight` for weights below
    -1e-12 and :class:`EmptyState` when nothing survives.
    """
    ssr = Ssr.coerce(ssr)
    if axis is not None and ssr is not Ssr.SU2:
        raise ValueError("axis metadata only applies to SU2 states")
    tol = config.tolerance()
    cleaned: dict[int, float] = {}
    for label, value in raw.items():
        label = int(label)
        if value < -1e-12:
            raise NegativeWeight(f"weight {value} at label {label}")
        if value > tol:
            cleaned[label] = float(value)
    if not cleaned:
        raise EmptyState("no weight above the zero threshold")
    total = sum(cleaned[l] for l in sorted(cleaned))
    weights = {l: cleaned[l] / total for l in sorted(cleaned)}
    return WeightState(ssr, weights, axis)


def spectrum(s: WeightState) -> Spectrum:
    """Support labels in ascending order together with their cardinality."""
    labels = s.support()
    return Spectrum(labels, len(labels))


def is_gapless(s: WeightState) -> bool:
    """True iff consecutive support labels differ by one charge step."""
    labels = s.support()
    step = s.ssr.label_step
    return all(b - a == step for a, b in zip(labels, labels[1:]))


def is_resource(s: WeightState) -> bool:
    """True iff the state cannot be prepared by invariant operations.

    For Z2 and U1 that means support on at least two labels; for SU2 every
    pure stretch-state combination except |0,0> is a resource.
    """
    labels = s.support()
    if len(labels) >= 2:
        return True
    if s.ssr is Ssr.SU2:
        return labels[0] > 0
    return False


def tensor(a: WeightState, b: WeightState) -> WeightState:
    """Weight map of the product state: convolution of the charge labels.

    Z2 labels add modulo 2; U1 numbers and SU2 stretch labels add exactly
    (|j,j> (x) |j',j'> = |j+j',j+j'>).
    """
    if a.ssr is not b.ssr:
        raise SsrMismatch(f"cannot tensor {a.ssr.value} with {b.ssr.value}")
    if a.ssr is Ssr.SU2 and a.axis is not None and b.axis is not None and a.axis != b.axis:
        raise SsrMismatch(f"different quantization axes {a.axis!r} and {b.axis!r}")
    out: dict[int, float] = {}
    for la, wa in a.weights.items():
        for lb, wb in b.weights.items():
            label = (la + lb) % 2 if a.ssr is Ssr.Z2 else la + lb
            out[label] = out.get(label, 0.0) + wa * wb
    axis = a.axis if a.axis is not None else b.axis
    return WeightState(a.ssr, {l: out[l] for l in sorted(out)}, axis)


def tensor_all(states: Iterable[WeightState]) -> WeightState:
    states = list(states)
    result = states[0]
    for s in states[1:]:
        result = tensor(result, s)
    return result


def from_json(data: "dict | str", ssr: Ssr | str | None = None) -> WeightState:
    """Parse the JSON state format.

    Accepts either the full object ``{"ssr": ..., "weights": {...}, "axis":
    ...}`` or a bare weight map when ``ssr`` is supplied.  SU2 labels are the
    twice-j integers (``"3"`` means j = 3/2).
    """
    if isinstance(data, str):
        data = json.loads(data)
    if "weights" in data:
        weights = data["weights"]
        ssr = Ssr.coerce(data.get("ssr", ssr))
        axis = data.get("axis")
    else:
        if ssr is None:
            raise ValueError("bare weight map needs an explicit ssr")
        weights = data
        ssr = Ssr.coerce(ssr)
        axis = None
    raw = {int(k): float(v) for k, v in weights.items()}
    return normalize(raw, ssr, axis)
