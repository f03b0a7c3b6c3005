"""Construction, validation, and application of invariant Kraus channels.

Two representations coexist:

* :class:`DiagonalKraus` -- the shift-times-diagonal form every invariant
  operation takes on the standard subspace (Z2 and U1) or on the stretch
  subspace of one quantization axis (SU2, pure-to-pure class).  These act
  directly on :class:`~frameness.states.WeightState` objects.

* :class:`SphericalTensorKraus` -- the general SU2 Wigner-Eckart form: a rank
  J family of 2J+1 operators over the truncated (j, m) basis, determined by
  reduced matrix elements f(j', j).

All SU2 matrix work happens on span{|j,m> : j <= jmax}; jmax is explicit and
shifts that would leave the window are errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import config
from .errors import (
    CompletenessViolated,
    IllegalShift,
    NotDensityMatrix,
    SsrMismatch,
    TriangleViolation,
)
from .states import Ssr, WeightState
from .wigner import HalfInt, HalfIntLike, three_j

BRANCH_EPS = 1e-12


@dataclass(frozen=True)
class DiagonalKraus:
    """K = S_shift * diag(profile) over charge labels (internal units).

    ``shift`` is the parity flip bit for Z2, the number shift k for U1, and
    -2J <= 0 for SU2 (j can only move downward).
    """

    shift: int
    profile: dict[int, complex]

    def out_label(self, label: int, ssr: Ssr) -> int:
        return (label + self.shift) % 2 if ssr is Ssr.Z2 else label + self.shift


@dataclass(frozen=True)
class KrausChannel:
    ssr: Ssr
    ops: tuple[DiagonalKraus, ...]
    trace_preserving: bool

    def to_json(self) -> dict:
        return {
            "ssr": self.ssr.value,
            "ops": [
                {
                    "shift": op.shift,
                    "profile": {
                        str(l): [op.profile[l].real, op.profile[l].imag]
                        for l in sorted(op.profile)
                    },
                }
                for op in self.ops
            ],
        }


def channel_from_json(data: dict) -> KrausChannel:
    ssr = Ssr.coerce(data["ssr"])
    ops = []
    for entry in data["ops"]:
        profile = {}
        for key, value in entry["profile"].items():
            if isinstance(value, (list, tuple)):
                profile[int(key)] = complex(value[0], value[1])
            else:
                profile[int(key)] = complex(value)
        ops.append((int(entry["shift"]), profile))
    return build_diagonal_channel(ssr, ops)


def build_diagonal_channel(
    ssr: Ssr | str, ops: Iterable[tuple[int, dict[int, complex]]]
) -> KrausChannel:
    """Validate shift/profile pairs and package them as a channel.

    Raises :class:`IllegalShift` for SU2 upward shifts or any entry that a
    shift would push below the lowest charge, and
    :class:`CompletenessViolated` when the per-label sum of |c|^2 exceeds 1.
    The channel is flagged trace-preserving when that sum equals 1 on every
    label it touches.
    """
    ssr = Ssr.coerce(ssr)
    tol = config.tolerance()
    built: list[DiagonalKraus] = []
    for shift, profile in ops:
        shift = int(shift)
        if ssr is Ssr.Z2 and shift not in (0, 1):
            raise IllegalShift(f"Z2 shift must be 0 or 1, got {shift}")
        if ssr is Ssr.SU2 and shift > 0:
            raise IllegalShift("SU2 stretch labels can only be shifted downward")
        cleaned: dict[int, complex] = {}
        for label, c in profile.items():
            label = int(label)
            c = complex(c)
            if abs(c) <= tol:
                continue
            if label < 0 or (ssr is Ssr.Z2 and label not in (0, 1)):
                raise IllegalShift(f"invalid charge label {label} for {ssr.value}")
            if ssr is not Ssr.Z2 and label + shift < 0:
                raise IllegalShift(
                    f"shift {shift} would push label {label} below the vacuum"
                )
            cleaned[label] = c
        if cleaned:
            built.append(DiagonalKraus(shift, cleaned))

    totals: dict[int, float] = {}
    for op in built:
        for label, c in op.profile.items():
            totals[label] = totals.get(label, 0.0) + abs(c) ** 2
    for label, total in totals.items():
        if total > 1.0 + tol:
            raise CompletenessViolated(
                f"sum of |c|^2 at label {label} is {total:.12f} > 1"
            )
    tp = bool(totals) and all(total >= 1.0 - tol for total in totals.values())
    return KrausChannel(ssr, tuple(built), tp)


def apply(ch: KrausChannel, s: WeightState) -> list[tuple[float, WeightState]]:
    """Measurement branches (probability, post-measurement state).

    Branch weights are w = sum_label |c_label|^2 p_label over the overlap of
    the profile support with the state support; branches below 1e-12 are
    dropped.  For a trace-preserving channel the weights sum to one.
    """
    if ch.ssr is not s.ssr:
        raise SsrMismatch(f"channel is {ch.ssr.value}, state is {s.ssr.value}")
    branches: list[tuple[float, WeightState]] = []
    for op in ch.ops:
        out: dict[int, float] = {}
        weight = 0.0
        for label, c in op.profile.items():
            p = s.weights.get(label)
            if p is None:
                continue
            contribution = abs(c) ** 2 * p
            if contribution <= 0.0:
                continue
            target = op.out_label(label, ch.ssr)
            out[target] = out.get(target, 0.0) + contribution
            weight += contribution
        if weight <= BRANCH_EPS:
            continue
        post = {l: out[l] / weight for l in sorted(out)}
        branches.append((weight, WeightState(ch.ssr, post, s.axis)))
    return branches


def compose_diagonal(outer: DiagonalKraus, inner: DiagonalKraus, ssr: Ssr) -> DiagonalKraus:
    """Kraus product outer * inner as a single shift-diagonal operator."""
    profile: dict[int, complex] = {}
    for label, c_in in inner.profile.items():
        mid = inner.out_label(label, ssr)
        c_out = outer.profile.get(mid)
        if c_out is None:
            continue
        profile[label] = c_in * c_out
    if ssr is Ssr.Z2:
        shift = (outer.shift + inner.shift) % 2
    else:
        shift = outer.shift + inner.shift
    return DiagonalKraus(shift, profile)


# ---------------------------------------------------------------------------
# Truncated (j, m) basis machinery for general SU2 operations


def su2_basis(jmax: HalfIntLike) -> list[tuple[int, int]]:
    """Ordered (2j, 2m) pairs spanning all j <= jmax, including half-integers."""
    tmax = HalfInt.coerce(jmax).twice
    basis = []
    for tj in range(tmax + 1):
        for tm in range(-tj, tj + 1, 2):
            basis.append((tj, tm))
    return basis


def basis_index(basis: Sequence[tuple[int, int]]) -> dict[tuple[int, int], int]:
    return {pair: i for i, pair in enumerate(basis)}


def angular_momentum_matrices(
    basis: Sequence[tuple[int, int]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Jz, J+, J-) on the truncated basis, hbar = 1."""
    dim = len(basis)
    index = basis_index(basis)
    jz = np.zeros((dim, dim), dtype=complex)
    jp = np.zeros((dim, dim), dtype=complex)
    for i, (tj, tm) in enumerate(basis):
        jz[i, i] = tm / 2.0
        if tm + 2 <= tj:
            coef = math.sqrt((tj * (tj + 2) - tm * (tm + 2)) / 4.0)
            jp[index[(tj, tm + 2)], i] = coef
    return jz, jp, jp.conj().T


@dataclass(frozen=True)
class SphericalTensorKraus:
    """Rank-J family K_{J,M} fixed by reduced elements f(j', j)."""

    J: HalfInt
    alpha: int
    f: dict[tuple[int, int], complex]
    jmax: HalfInt
    _matrices: tuple[np.ndarray, ...] = field(repr=False, compare=False, default=())

    def matrices(self) -> tuple[np.ndarray, ...]:
        """The 2J+1 operators, ordered M = -J ... J."""
        return self._matrices


def build_spherical_tensor(
    J: HalfIntLike,
    f: dict[tuple[HalfIntLike, HalfIntLike], complex],
    jmax: HalfIntLike,
    alpha: int = 0,
) -> SphericalTensorKraus:
    """Materialize K_{J,M} with elements (-1)^(j'-m) 3j(j' J j; -m M m-M) f(j',j).

    ``f`` maps (j', j) pairs to reduced matrix elements; entries outside the
    coupling range |J-j'| <= j <= J+j' (or outside the window, or with the
    wrong parity to couple) raise :class:`TriangleViolation`.
    """
    tJ = HalfInt.coerce(J).twice
    tmax = HalfInt.coerce(jmax).twice
    if tJ < 0:
        raise TriangleViolation("tensor rank must be nonnegative")
    reduced: dict[tuple[int, int], complex] = {}
    for (jp_raw, j_raw), value in f.items():
        if value == 0:
            continue
        tjp = HalfInt.coerce(jp_raw).twice
        tj = HalfInt.coerce(j_raw).twice
        if tjp > tmax or tj > tmax or min(tjp, tj) < 0:
            raise TriangleViolation(f"(j'={tjp}/2, j={tj}/2) outside the window")
        if tj < abs(tJ - tjp) or tj > tJ + tjp or (tjp + tJ + tj) % 2 != 0:
            raise TriangleViolation(
                f"f(j'={tjp}/2, j={tj}/2) violates the rank-{tJ}/2 coupling range"
            )
        reduced[(tjp, tj)] = complex(value)

    basis = su2_basis(HalfInt(tmax))
    index = basis_index(basis)
    dim = len(basis)
    mats = []
    for tM in range(-tJ, tJ + 1, 2):
        mat = np.zeros((dim, dim), dtype=complex)
        for (tjp, tj), value in reduced.items():
            for tm in range(-tjp, tjp + 1, 2):
                tm_col = tm - tM
                if abs(tm_col) > tj:
                    continue
                phase = -1.0 if ((tjp - tm) // 2) % 2 else 1.0
                symbol = three_j(
                    HalfInt(tjp), HalfInt(tJ), HalfInt(tj),
                    HalfInt(-tm), HalfInt(tM), HalfInt(tm_col),
                )
                if symbol == 0.0:
                    continue
                mat[index[(tjp, tm)], index[(tj, tm_col)]] += phase * symbol * value
        mats.append(mat)
    return SphericalTensorKraus(HalfInt(tJ), alpha, reduced, HalfInt(tmax), tuple(mats))


def verify_covariance(t: SphericalTensorKraus) -> float:
    """Max-norm residual of the spherical-tensor commutation relations.

    Checks [Jz, K_M] = M K_M and [J+-, K_M] = sqrt(J(J+1) - M(M+-1)) K_{M+-1}
    entrywise; a valid Wigner-Eckart construction stays below 1e-9.
    """
    basis = su2_basis(t.jmax)
    jz, jp, jm = angular_momentum_matrices(basis)
    mats = t.matrices()
    tJ = t.J.twice
    jval = tJ / 2.0
    residual = 0.0
    for idx, tM in enumerate(range(-tJ, tJ + 1, 2)):
        mval = tM / 2.0
        k = mats[idx]
        residual = max(residual, np.abs(jz @ k - k @ jz - mval * k).max())
        up = mats[idx + 1] if idx + 1 < len(mats) else np.zeros_like(k)
        coef = math.sqrt(max(jval * (jval + 1) - mval * (mval + 1), 0.0))
        residual = max(residual, np.abs(jp @ k - k @ jp - coef * up).max())
        down = mats[idx - 1] if idx - 1 >= 0 else np.zeros_like(k)
        coef = math.sqrt(max(jval * (jval + 1) - mval * (mval - 1), 0.0))
        residual = max(residual, np.abs(jm @ k - k @ jm - coef * down).max())
    return float(residual)


def _check_density(rho: np.ndarray) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise NotDensityMatrix(f"expected a square matrix, got shape {rho.shape}")
    tol = max(1e-8, 10 * config.tolerance())
    if np.abs(rho - rho.conj().T).max() > tol:
        raise NotDensityMatrix("matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol:
        raise NotDensityMatrix(f"trace is {np.trace(rho).real}, expected 1")
    eigenvalues = np.linalg.eigvalsh(rho)
    if eigenvalues.min() < -tol:
        raise NotDensityMatrix(f"negative eigenvalue {eigenvalues.min()}")
    return rho


def twirl(rho: np.ndarray, ssr: Ssr | str) -> np.ndarray:
    """Exact group average of a density matrix over the SSR group.

    Z2 averages the identity and parity conjugations; U1 erases all
    coherences between number sectors (closed form of the Haar average); SU2
    projects each j block onto a multiple of the identity.  The SU2 input
    must live on a full su2_basis window, from which jmax is inferred.
    """
    ssr = Ssr.coerce(ssr)
    rho = _check_density(rho)
    dim = rho.shape[0]
    if ssr is Ssr.Z2:
        if dim != 2:
            raise NotDensityMatrix("Z2 standard subspace is two-dimensional")
        parity = np.diag([1.0, -1.0])
        return (rho + parity @ rho @ parity) / 2.0
    if ssr is Ssr.U1:
        return np.diag(np.diag(rho))
    tmax = _infer_tmax(dim)
    basis = su2_basis(HalfInt(tmax))
    out = np.zeros_like(rho)
    start = 0
    for tj in range(tmax + 1):
        size = tj + 1
        block = rho[start : start + size, start : start + size]
        out[start : start + size, start : start + size] = (
            np.trace(block) / size * np.eye(size)
        )
        start += size
    assert start == len(basis)
    return out


def _infer_tmax(dim: int) -> int:
    tmax = 0
    total = 0
    while True:
        total += tmax + 1
        if total == dim:
            return tmax
        if total > dim:
            raise NotDensityMatrix(
                f"dimension {dim} does not match a truncated (j,m) basis"
            )
        tmax += 1


# ---------------------------------------------------------------------------
# Invariance checking via Choi matrices


def stretch_projection(op: DiagonalKraus, jmax: HalfIntLike) -> SphericalTensorKraus:
    """Extend a stretch-subspace Kraus operator to its full rank-J tensor.

    A diagonal SU2 operator S_{-J} diag(c_j) is the restriction to the
    stretch states of the tensor with f(j', j) = delta_{j', j-J} f_J(j); the
    reduced elements are recovered by dividing out the stretch 3j value.
    """
    tJ = -op.shift
    if tJ < 0:
        raise IllegalShift("SU2 stretch operators shift downward")
    f: dict[tuple[HalfInt, HalfInt], complex] = {}
    for tj, c in op.profile.items():
        symbol = three_j(
            HalfInt(tj - tJ), HalfInt(tJ), HalfInt(tj),
            HalfInt(-(tj - tJ)), HalfInt(-tJ), HalfInt(tj),
        )
        if symbol == 0.0:
            raise TriangleViolation(f"no stretch coupling for label {tj} with J={tJ}/2")
        f[(HalfInt(tj - tJ), HalfInt(tj))] = c / symbol
    return build_spherical_tensor(HalfInt(tJ), f, jmax)


def kraus_matrices(ch: KrausChannel, dim: int | None = None) -> list[np.ndarray]:
    """Dense matrices of a diagonal channel on its truncated basis.

    Z2 uses the two-dimensional parity basis; U1 the number basis 0..nmax;
    SU2 ops are first extended to their Wigner-Eckart tensors on the full
    (j, m) window, so the list contains every K_{J,M} of every branch.
    """
    if ch.ssr is Ssr.Z2:
        mats = []
        for op in ch.ops:
            mat = np.zeros((2, 2), dtype=complex)
            for label, c in op.profile.items():
                mat[(label + op.shift) % 2, label] = c
            mats.append(mat)
        return mats
    if ch.ssr is Ssr.U1:
        if dim is None:
            top = 0
            for op in ch.ops:
                for label in op.profile:
                    top = max(top, label, label + op.shift)
            dim = top + 1
        mats = []
        for op in ch.ops:
            mat = np.zeros((dim, dim), dtype=complex)
            for label, c in op.profile.items():
                mat[label + op.shift, label] = c
            mats.append(mat)
        return mats
    tmax = 0
    for op in ch.ops:
        tmax = max(tmax, max(op.profile, default=0))
    mats = []
    for op in ch.ops:
        tensor_op = stretch_projection(op, HalfInt(tmax))
        mats.extend(tensor_op.matrices())
    return mats


def choi_matrix(mats: Sequence[np.ndarray]) -> np.ndarray:
    vecs = [np.asarray(k, dtype=complex).reshape(-1) for k in mats]
    dim2 = vecs[0].size
    choi = np.zeros((dim2, dim2), dtype=complex)
    for v in vecs:
        choi += np.outer(v, v.conj())
    return choi


def _group_unitaries(
    ssr: Ssr, dim: int, samples: int, seed: int
) -> list[np.ndarray]:
    if ssr is Ssr.Z2:
        return [np.diag([1.0 + 0j, -1.0])]
    if ssr is Ssr.U1:
        phases = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)[1:]
        n = np.arange(dim)
        return [np.diag(np.exp(1j * phi * n)) for phi in phases]
    rng = np.random.default_rng(seed)
    tmax = _infer_tmax(dim)
    basis = su2_basis(HalfInt(tmax))
    jz, jp, jm = angular_momentum_matrices(basis)
    jx = (jp + jm) / 2.0
    jy = (jp - jm) / 2.0j
    unitaries = []
    for _ in range(samples):
        quaternion = rng.normal(size=4)
        quaternion /= np.linalg.norm(quaternion)
        angle = 2.0 * math.atan2(np.linalg.norm(quaternion[1:]), quaternion[0])
        norm = np.linalg.norm(quaternion[1:])
        axis = quaternion[1:] / norm if norm > 1e-12 else np.array([0.0, 0.0, 1.0])
        h = angle * (axis[0] * jx + axis[1] * jy + axis[2] * jz)
        vals, vecs = np.linalg.eigh(h)
        unitaries.append((vecs * np.exp(1j * vals)) @ vecs.conj().T)
    return unitaries


def is_invariant_channel(
    ch: "KrausChannel | Sequence[np.ndarray] | Sequence[SphericalTensorKraus]",
    ssr: Ssr | str | None = None,
    samples: int = 200,
    seed: int = 0,
) -> tuple[bool, float]:
    """Numerically test T(g) o E o T(g)^-1 = E by comparing Choi matrices.

    Z2 checks both group elements exactly; U1 uses ``samples`` phases on a
    uniform grid; SU2 uses ``samples`` Haar-random rotations drawn from a
    seeded generator.  Returns (verdict, max deviation); deviations below
    1e-8 count as invariant.  Choi matrices are compared because Kraus
    decompositions are only unique up to unitary remixing.
    """
    if isinstance(ch, KrausChannel):
        ssr = ch.ssr
        mats = kraus_matrices(ch)
    else:
        ops = list(ch)
        if ops and isinstance(ops[0], SphericalTensorKraus):
            ssr = Ssr.SU2
            mats = [m for op in ops for m in op.matrices()]
        else:
            if ssr is None:
                raise ValueError("raw Kraus matrices need an explicit ssr")
            ssr = Ssr.coerce(ssr)
            mats = [np.asarray(m, dtype=complex) for m in ops]
    dim = mats[0].shape[0]
    reference = choi_matrix(mats)
    scale = max(np.abs(reference).max(), 1.0)
    deviation = 0.0
    for u in _group_unitaries(ssr, dim, samples, seed):
        conjugated = [u @ k @ u.conj().T for k in mats]
        deviation = max(
            deviation, float(np.abs(choi_matrix(conjugated) - reference).max() / scale)
        )
    return deviation < 1e-8, deviation


def apply_density(mats: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Unnormalized channel output sum_K K rho K^dagger."""
    rho = np.asarray(rho, dtype=complex)
    out = np.zeros_like(rho)
    for k in mats:
        out += k @ rho @ k.conj().T
    return out


def stretch_vector(s: WeightState, jmax: HalfIntLike) -> np.ndarray:
    """Amplitude vector of a stretch-subspace state on the (j, m) window."""
    if s.ssr is not Ssr.SU2:
        raise SsrMismatch("stretch_vector takes SU2 states")
    basis = su2_basis(jmax)
    index = basis_index(basis)
    vec = np.zeros(len(basis), dtype=complex)
    for tj, p in s.weights.items():
        vec[index[(tj, tj)]] = math.sqrt(p)
    return vec
