import itertools
import math

import numpy as np
import pytest

from conftest import grouped_branches, rand_det_feasible_pair, rand_state
from frameness import (
    MaxProbMethod,
    MonotoneViolated,
    NotAResource,
    apply,
    det_feasible,
    majorizes,
    max_prob,
    normalize,
    stoch_feasible,
    stochastic_monotones,
    synthesize_ensemble_z2,
)
from frameness.monotones import chirality


def u1(weights):
    return normalize(weights, "u1")


def su2(weights):
    return normalize(weights, "su2")


def z2(p0):
    return normalize({0: p0, 1: 1.0 - p0}, "z2")


REFBIT = {0: 0.5, 1: 0.5}


def test_det_shift_examples():
    cert = det_feasible(u1({1: 0.5, 2: 0.5}), u1(REFBIT))
    assert cert.feasible and cert.shift_weights == {1: pytest.approx(1.0)}

    cert = det_feasible(u1({0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25}), u1(REFBIT))
    assert cert.feasible
    assert cert.shift_weights == {0: pytest.approx(0.5), 2: pytest.approx(0.5)}

    cert = det_feasible(u1({0: 0.25, 1: 0.5, 2: 0.25}), u1(REFBIT))
    assert cert.feasible
    assert cert.shift_weights == {0: pytest.approx(0.5), 1: pytest.approx(0.5)}

    # reverse direction is infeasible (and majorization must fail)
    reverse = det_feasible(u1(REFBIT), u1({0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25}))
    assert not reverse.feasible and reverse.witness


def test_det_su2_downward_only():
    cert = det_feasible(su2({2: 0.5, 4: 0.5}), su2({0: 0.5, 2: 0.5}))
    assert cert.feasible and cert.shift_weights == {2: pytest.approx(1.0)}
    # the reverse needs an upward shift, which SU2 forbids
    assert not det_feasible(su2({0: 0.5, 2: 0.5}), su2({2: 0.5, 4: 0.5})).feasible


def test_det_certificates_reproduce_target():
    rng = np.random.default_rng(321)
    for ssr in ("z2", "u1", "su2"):
        for _ in range(40):
            source, target = rand_det_feasible_pair(rng, ssr)
            cert = det_feasible(source, target)
            assert cert.feasible, (source, target)
            branches = apply(cert.realizing_channel, source)
            assert sum(w for w, _ in branches) == pytest.approx(1.0, abs=1e-9)
            for _, state in branches:
                assert state.close_to(target, 1e-8)


def test_det_requires_resources():
    with pytest.raises(NotAResource):
        det_feasible(u1({3: 1.0}), u1(REFBIT))
    with pytest.raises(NotAResource):
        det_feasible(u1(REFBIT), u1({0: 1.0}))


def test_det_axis_mismatch_is_infeasible():
    a = normalize({0: 0.5, 2: 0.5}, "su2", axis="z")
    b = normalize({0: 0.5, 2: 0.5}, "su2", axis="x")
    assert not det_feasible(a, b).feasible
    assert stoch_feasible(a, b) == (False, [])
    assert max_prob(a, b).probability == 0.0


def test_stoch_examples():
    psi = u1({n: 1.0 for n in (1, 3, 4, 6, 10, 11, 12)})
    phi = u1({n: 1.0 for n in (7, 13, 14)})
    ok, shifts = stoch_feasible(psi, phi)
    assert ok and 3 in shifts

    ok, shifts = stoch_feasible(u1(REFBIT), u1({0: 0.5, 2: 0.5}))
    assert not ok and shifts == []
    ok, _ = stoch_feasible(u1({0: 0.5, 2: 0.5}), u1(REFBIT))
    assert not ok

    a, b = su2({4: 0.5, 6: 0.5}), su2({0: 0.4, 2: 0.3, 4: 0.3})
    assert stoch_feasible(a, b) == (False, [])
    assert stoch_feasible(b, a) == (False, [])


def test_stoch_z2_always_feasible():
    assert stoch_feasible(z2(0.9), z2(0.2)) == (True, [0, 1])


def test_max_prob_z2_formula_and_protocol():
    # formula value, then the explicit two-outcome protocol reproduces it
    psi, phi = z2(0.7), z2(0.6)
    result = max_prob(psi, phi)
    assert result.probability == pytest.approx(0.3 / 0.4, abs=1e-12)
    x = math.sqrt(phi.weight(0) * psi.weight(1) / (phi.weight(1) * psi.weight(0)))
    from frameness import build_diagonal_channel

    protocol = build_diagonal_channel(
        "z2", [(0, {0: x, 1: 1.0}), (0, {0: math.sqrt(1 - x * x)})]
    )
    branches = apply(protocol, psi)
    success = [b for b in branches if b[1].close_to(phi, 1e-9)]
    assert len(success) == 1
    assert success[0][0] == pytest.approx(result.probability, abs=1e-9)


def test_max_prob_single_shift_closed_form():
    result = max_prob(u1({0: 0.7, 1: 0.3}), u1(REFBIT))
    assert result.method is MaxProbMethod.CLOSED_FORM
    assert result.probability == pytest.approx(0.6, abs=1e-12)
    # SU2 analogue with one admissible downward shift
    result = max_prob(su2({2: 0.7, 4: 0.3}), su2({0: 0.5, 2: 0.5}))
    assert result.method is MaxProbMethod.CLOSED_FORM
    assert result.probability == pytest.approx(0.6, abs=1e-12)


def test_max_prob_lp_matches_deterministic_verdict():
    result = max_prob(u1({0: 0.25, 1: 0.25, 2: 0.25, 3: 0.25}), u1(REFBIT))
    assert result.method is MaxProbMethod.LP_EXTENSION
    assert result.probability == pytest.approx(1.0, abs=1e-9)
    assert result.per_shift_weights == {
        0: pytest.approx(0.5),
        -2: pytest.approx(0.5),
    }


def test_max_prob_additivity_lower_bound():
    # two admissible shifts whose shifted targets do not overlap: the
    # probabilities add, so the LP must reach the sum of the two closed forms
    psi = u1({0: 0.35, 1: 0.15, 5: 0.2, 6: 0.3})
    phi = u1(REFBIT)
    ok, shifts = stoch_feasible(psi, phi)
    assert ok and len(shifts) == 2
    singles = []
    for k in shifts:
        singles.append(min(psi.weight(t - k) / w for t, w in phi.weights.items()))
    result = max_prob(psi, phi)
    assert result.probability >= sum(singles) - 1e-9
    assert result.probability >= max(singles) - 1e-9


def _brute_force_lp(source, target, shifts, step):
    offsets = [-k for k in shifts]  # U1: det-units offset
    labels = source.support()
    grid = np.arange(0.0, 1.0 + step / 2, step)
    best = 0.0
    for combo in itertools.product(grid, repeat=len(offsets)):
        if sum(combo) <= best:
            continue
        feasible = all(
            sum(w * target.weight(n - k) for w, k in zip(combo, offsets))
            <= source.weight(n) + 1e-12
            for n in labels
        )
        if feasible:
            best = sum(combo)
    return best


def test_max_prob_lp_against_brute_force():
    rng = np.random.default_rng(77)
    tried = 0
    while tried < 12:
        psi = rand_state(rng, "u1", max_support=5, label_range=8)
        phi = rand_state(rng, "u1", max_support=3, label_range=4)
        ok, shifts = stoch_feasible(psi, phi)
        if not ok or len(shifts) < 2 or len(shifts) > 3:
            continue
        tried += 1
        result = max_prob(psi, phi)
        step = 0.01
        brute = _brute_force_lp(psi, phi, shifts, step)
        assert result.probability >= brute - 1e-9
        assert result.probability <= brute + step * len(shifts) + 1e-9
        # never below the best single shift
        for k in shifts:
            single = min(psi.weight(t - k) / w for t, w in phi.weights.items())
            assert result.probability >= min(1.0, single) - 1e-9


def test_consistency_det_maxprob_stoch():
    rng = np.random.default_rng(1234)
    for ssr in ("z2", "u1", "su2"):
        for trial in range(500):
            if trial % 2 == 0:
                source, target = rand_det_feasible_pair(rng, ssr)
            else:
                source = rand_state(rng, ssr, max_support=8)
                target = rand_state(rng, ssr, max_support=8)
            cert = det_feasible(source, target)
            prob = max_prob(source, target)
            ok, _ = stoch_feasible(source, target)
            if cert.feasible:
                assert prob.probability == pytest.approx(1.0, abs=1e-9)
            if prob.probability > 1e-9:
                assert ok
            if cert.feasible and source.ssr.value == "u1":
                assert majorizes(target, source)


def test_stochastic_monotones_examples():
    frag = stochastic_monotones(u1({n: 1.0 for n in (1, 3, 4, 6, 10, 11, 12)}))
    assert frag.mons == (11, 10, 9, 5, 3, 2)
    frag_target = stochastic_monotones(u1({n: 1.0 for n in (7, 13, 14)}))
    assert frag_target.mons == (7, 6)
    # shifted inclusion holds with l = 3
    assert set(frag_target.mons) <= {m - 3 for m in frag.mons}
    assert stochastic_monotones(u1({5: 1.0})).mons == ()
    su2_frag = stochastic_monotones(su2({2: 0.5, 6: 0.5}))
    assert su2_frag.j_max == 6 and su2_frag.mons == (4,)
    z2_frag = stochastic_monotones(z2(0.7))
    assert z2_frag.cardinality == 2 and z2_frag.mons == ()


def test_stochastic_monotones_never_increase_along_conversions():
    rng = np.random.default_rng(555)
    for ssr in ("u1", "su2"):
        count = 0
        while count < 60:
            source = rand_state(rng, ssr, max_support=6)
            target = rand_state(rng, ssr, max_support=6)
            ok, _ = stoch_feasible(source, target)
            if not ok:
                continue
            count += 1
            f_s = stochastic_monotones(source)
            f_t = stochastic_monotones(target)
            assert f_t.cardinality <= f_s.cardinality
            for i, diff in enumerate(f_t.differences):
                assert diff <= f_s.differences[i]
            if ssr == "su2":
                assert f_t.j_max <= f_s.j_max


def test_ensemble_synthesis_identity():
    psi = z2(0.7)
    ch = synthesize_ensemble_z2(psi, [(1.0, psi)])
    branches = grouped_branches(apply(ch, psi))
    assert len(branches) == 1
    w, state = branches[0]
    assert w == pytest.approx(1.0, abs=1e-9) and state.close_to(psi, 1e-8)


def test_ensemble_synthesis_from_maximal_resource():
    plus = z2(0.5)
    targets = [(0.5, z2(0.8)), (0.5, z2(0.35))]
    ch = synthesize_ensemble_z2(plus, targets)
    branches = grouped_branches(apply(ch, plus))
    assert len(branches) == 2
    for w_mu, phi in targets:
        match = [b for b in branches if b[1].close_to(phi, 1e-8)]
        assert len(match) == 1
        assert match[0][0] == pytest.approx(w_mu, abs=1e-8)


def test_ensemble_synthesis_random_instances():
    rng = np.random.default_rng(99)
    for _ in range(50):
        psi = z2(float(rng.uniform(0.5, 0.95)))
        count = int(rng.integers(1, 4))
        weights = rng.dirichlet(np.ones(count))
        cs = rng.uniform(0.0, chirality(psi), size=count)
        targets = []
        for w_mu, c in zip(weights, cs):
            q_small = c / 2.0
            flip = rng.random() < 0.5
            state = z2(q_small if flip else 1.0 - q_small)
            targets.append((float(w_mu), state))
        budget = sum(w * chirality(t) for w, t in targets)
        if budget > chirality(psi):
            continue
        ch = synthesize_ensemble_z2(psi, targets)
        branches = grouped_branches(apply(ch, psi), tol=1e-7)
        for w_mu, phi in targets:
            match = [b for b in branches if b[1].close_to(phi, 1e-7)]
            assert match, (psi, targets)
            assert sum(m[0] for m in match) == pytest.approx(w_mu, abs=1e-8)


def test_ensemble_synthesis_monotone_violated():
    psi = z2(0.9)  # chirality 0.2
    with pytest.raises(MonotoneViolated):
        synthesize_ensemble_z2(psi, [(1.0, z2(0.75))])  # chirality 0.5
