import math

import numpy as np
import pytest

import _oracles as o
from uncrel import (
    DensityMatrix,
    Observable,
    ObservableSet,
    OrthogonalityError,
    PureState,
    Relation,
    SkippedRelation,
    UnsupportedCountError,
    UnsupportedStateError,
    chen_fei,
    evaluate_all,
    maccone_pati_deviation,
    maccone_pati_orthogonal,
    orthogonal_qubit,
    pauli,
    pauli_triple,
    random_observable,
    random_pure_state,
    robertson,
    song,
    sum_minus,
    sum_plus,
    triple_commutator,
    triple_pairwise,
    triple_sum,
)

SX, SY, SZ = pauli("x"), pauli("y"), pauli("z")
KET0 = PureState(o.KET0)
KET1 = PureState(o.KET1)
EQUATOR_X = PureState(o.ket(math.pi / 2, 0.0))
MIXED = DensityMatrix(np.eye(2) / 2.0)


def random_instance(dim, n, seed):
    obs = ObservableSet(
        tuple(random_observable(dim, seed=1000 * seed + k) for k in range(n))
    )
    return obs, random_pure_state(dim, seed=seed)


# -- report bookkeeping -------------------------------------------------------

def test_report_slack_and_holds_are_consistent():
    rep = robertson(SX, SY, KET0)
    assert rep.slack == rep.lhs - rep.rhs
    assert rep.holds == (rep.slack >= -1e-9)
    assert rep.relation is Relation.ROBERTSON


def test_relation_labels():
    assert Relation.TRIPLE_SUM.label == "T1"
    assert Relation.TRIPLE_COMMUTATOR.label == "T2"
    assert Relation.TRIPLE_PAIRWISE.label == "T3"
    assert Relation.SUM_PLUS.label == "M1"
    assert Relation.SUM_MINUS.label == "M2"
    assert Relation.CHEN_FEI.label == "M3"
    assert Relation.SONG.label == "M4"


def test_observable_set_contracts():
    with pytest.raises(UnsupportedCountError):
        ObservableSet((SX,))
    with pytest.raises(Exception, match="mixed dimensions"):
        ObservableSet((SX, random_observable(3, seed=0)))
    triple = pauli_triple()
    assert triple.count == 3 and len(triple) == 3
    assert triple[2].matrix[0, 0] == 1.0


# -- product bound ------------------------------------------------------------

def test_robertson_equality_at_pole():
    rep = robertson(SX, SY, KET0)
    assert rep.lhs == pytest.approx(1.0, abs=1e-12)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)
    assert rep.holds


def test_robertson_self_commutator():
    assert robertson(SX, SX, KET0).rhs == 0.0


def test_robertson_trivial_on_equator():
    # The x eigenstate kills both sides: zero variance and zero <sigma_z>.
    rep = robertson(SX, SY, EQUATOR_X)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)
    assert rep.holds


def test_robertson_matches_oracle_on_random_instances():
    for seed in range(20):
        a = random_observable(3, seed=seed)
        b = random_observable(3, seed=500 + seed)
        psi = random_pure_state(3, seed=seed)
        rep = robertson(a, b, psi)
        assert rep.rhs == pytest.approx(
            o.robertson_rhs(a.matrix, b.matrix, psi.amplitudes), abs=1e-12
        )
        assert rep.holds


# -- orthogonal-state sum bound -----------------------------------------------

def test_orthogonal_bound_equality_witness():
    rep = maccone_pati_orthogonal(SX, SY, KET0, KET1)
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.rhs == pytest.approx(2.0, abs=1e-12)
    assert rep.holds


def test_orthogonal_bound_zero_commutator_tie_break():
    rep = maccone_pati_orthogonal(SX, SX, KET0, KET1)
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.rhs == pytest.approx(2.0, abs=1e-12)


def test_orthogonal_bound_inequality_on_equator():
    state = EQUATOR_X
    rep = maccone_pati_orthogonal(SX, SY, state, orthogonal_qubit(state))
    assert rep.lhs == pytest.approx(1.0, abs=1e-12)
    assert rep.rhs <= 1.0 + 1e-9


def test_orthogonal_bound_rejects_non_orthogonal():
    with pytest.raises(OrthogonalityError):
        maccone_pati_orthogonal(SX, SY, KET0, KET0)


def test_orthogonal_bound_rejects_mixed():
    with pytest.raises(UnsupportedStateError):
        maccone_pati_orthogonal(SX, SY, MIXED, KET1)


def test_orthogonal_bound_matches_oracle():
    for seed in range(30):
        a = random_observable(2, seed=seed)
        b = random_observable(2, seed=700 + seed)
        psi = random_pure_state(2, seed=seed)
        perp = orthogonal_qubit(psi)
        rep = maccone_pati_orthogonal(a, b, psi, perp)
        assert rep.rhs == pytest.approx(
            o.mp_orthogonal_rhs(a.matrix, b.matrix, psi.amplitudes, perp.amplitudes),
            abs=1e-12,
        )
        assert rep.holds


# -- deviation sum bound ------------------------------------------------------

def test_deviation_bound_at_pole():
    rep = maccone_pati_deviation(SX, SY, KET0)
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)


def test_deviation_bound_degenerates_on_eigenstate():
    assert maccone_pati_deviation(SZ, SZ, KET0).rhs == 0.0


def test_deviation_bound_dual_path():
    state = PureState(o.ket(math.pi / 4, 0.0))
    rep = maccone_pati_deviation(SX, SZ, state)
    assert rep.rhs == pytest.approx(
        o.mp_deviation_rhs(o.PX, o.PZ, state.amplitudes), abs=1e-10
    )


def test_deviation_bound_rejects_mixed():
    with pytest.raises(UnsupportedStateError):
        maccone_pati_deviation(SX, SY, MIXED)


def test_deviation_bound_dual_path_random():
    for seed in range(30):
        a = random_observable(2, seed=seed)
        b = random_observable(2, seed=900 + seed)
        psi = random_pure_state(2, seed=seed)
        rep = maccone_pati_deviation(a, b, psi)
        assert rep.rhs == pytest.approx(
            o.mp_deviation_rhs(a.matrix, b.matrix, psi.amplitudes), abs=1e-10
        )
        assert rep.holds


# -- triple bounds ------------------------------------------------------------

def test_triple_sum_on_pole_and_equator():
    for state in (KET0, EQUATOR_X):
        rep = triple_sum(SX, SY, SZ, state)
        assert rep.lhs == pytest.approx(2.0, abs=1e-12)
        assert rep.rhs == pytest.approx(o.ANCHOR_T1, abs=1e-12)
        assert rep.holds


def test_triple_sum_commuting_constants():
    ident = Observable(np.eye(2))
    rep = triple_sum(ident, 2.0 * ident, 3.0 * ident, KET0)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_triple_commutator_at_pole():
    rep = triple_commutator(SX, SY, SZ, KET0)
    assert rep.rhs == pytest.approx(o.ANCHOR_T2, abs=1e-12)


def test_triple_commutator_commuting_diagonals():
    d1 = Observable(np.diag([1.0, 2.0]))
    d2 = Observable(np.diag([-1.0, 3.0]))
    d3 = Observable(np.diag([0.5, 0.5]))
    psi = random_pure_state(2, seed=4)
    assert triple_commutator(d1, d2, d3, psi).rhs == 0.0


def test_triple_commutator_dual_path():
    state = PureState(o.ket(math.pi / 3, math.pi / 4))
    rep = triple_commutator(SX, SY, SZ, state)
    assert rep.rhs == pytest.approx(
        o.triple_commutator_rhs(o.PX, o.PY, o.PZ, state.amplitudes), abs=1e-12
    )


def test_triple_pairwise_at_pole():
    rep = triple_pairwise(SX, SY, SZ, KET0)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)
    assert rep.mid == pytest.approx(1.0, abs=1e-12)


def test_triple_pairwise_equator():
    rep = triple_pairwise(SX, SY, SZ, EQUATOR_X)
    assert rep.lhs == pytest.approx(2.0, abs=1e-12)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)


def test_triple_pairwise_maximally_mixed():
    rep = triple_pairwise(SX, SY, SZ, MIXED)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_triple_pairwise_chain():
    # lhs >= mid >= rhs links through the pairwise deviation products.
    for seed in range(20):
        a = random_observable(2, seed=seed)
        b = random_observable(2, seed=300 + seed)
        c = random_observable(2, seed=600 + seed)
        psi = random_pure_state(2, seed=seed)
        rep = triple_pairwise(a, b, c, psi)
        assert rep.lhs >= rep.mid - 1e-10
        assert rep.mid >= rep.rhs - 1e-10


# -- N-observable bounds ------------------------------------------------------

def test_sum_plus_at_pole():
    rep = sum_plus(pauli_triple(), KET0)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)


def test_sum_plus_identical_pair_on_eigenstate():
    rep = sum_plus(ObservableSet((SZ, SZ)), KET0)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)


def test_sum_plus_matches_oracle_off_pole():
    state = PureState(o.ket(math.pi / 3, 0.0))
    rep = sum_plus(pauli_triple(), state)
    assert rep.rhs == pytest.approx(o.sum_plus_rhs(list(o.PAULIS), state.amplitudes), abs=1e-12)


def test_sum_minus_at_pole():
    rep = sum_minus(pauli_triple(), KET0)
    assert rep.rhs == pytest.approx(1.0, abs=1e-12)


def test_sum_minus_identical_pair():
    rep = sum_minus(ObservableSet((SX, SX)), random_pure_state(2, seed=9))
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_parallelogram_identity():
    for seed in range(15):
        obs, psi = random_instance(dim=3, n=4, seed=seed)
        plus = sum_plus(obs, psi)
        minus = sum_minus(obs, psi)
        assert plus.rhs + minus.rhs == pytest.approx(plus.lhs, abs=1e-10)


def test_chen_fei_at_pole():
    rep = chen_fei(pauli_triple(), KET0)
    assert rep.rhs == pytest.approx(o.ANCHOR_M3, abs=1e-12)


def test_chen_fei_needs_three():
    with pytest.raises(UnsupportedCountError):
        chen_fei(ObservableSet((SX, SY)), KET0)


def test_chen_fei_identical_projectors():
    proj = Observable(np.outer(o.KET0, o.KET0.conj()))
    rep = chen_fei(ObservableSet((proj, proj, proj)), KET0)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)
    assert rep.lhs == pytest.approx(0.0, abs=1e-12)


def test_chen_fei_dual_path_at_singular_point():
    # theta = pi/4 puts the state on an eigenvector of sigma_x + sigma_z,
    # so the z-x pair variance vanishes; both computation routes must land
    # on the same side of the square-root kink.
    state = PureState(o.ket(math.pi / 4, 0.0))
    rep = chen_fei(pauli_triple(), state)
    assert rep.rhs == pytest.approx(
        o.chen_fei_rhs(list(o.PAULIS), state.amplitudes), abs=1e-10
    )


def test_song_at_pole():
    rep = song(pauli_triple(), KET0)
    assert rep.rhs == pytest.approx(o.ANCHOR_M4, abs=1e-12)


def test_song_pair_of_identical_on_eigenstate():
    rep = song(ObservableSet((SZ, SZ)), KET0)
    assert rep.rhs == pytest.approx(0.0, abs=1e-12)


def test_nary_bounds_match_oracle_random():
    for seed in range(12):
        for n in (3, 4, 5):
            obs, psi = random_instance(dim=2, n=n, seed=10 * seed + n)
            mats = [ob.matrix for ob in obs]
            v = psi.amplitudes
            assert sum_plus(obs, psi).rhs == pytest.approx(o.sum_plus_rhs(mats, v), abs=1e-10)
            assert sum_minus(obs, psi).rhs == pytest.approx(o.sum_minus_rhs(mats, v), abs=1e-10)
            assert chen_fei(obs, psi).rhs == pytest.approx(o.chen_fei_rhs(mats, v), abs=1e-10)
            assert song(obs, psi).rhs == pytest.approx(o.song_rhs(mats, v), abs=1e-10)


def test_mixed_states_accepted_by_sum_forms():
    rho = DensityMatrix(np.diag([0.25, 0.75]))
    for fn in (sum_plus, sum_minus, chen_fei, song):
        rep = fn(pauli_triple(), rho)
        assert rep.holds
    assert triple_sum(SX, SY, SZ, rho).holds


# -- batch evaluation ---------------------------------------------------------

def test_evaluate_all_pauli_pole():
    results = evaluate_all(pauli_triple(), KET0)
    reports = {r.relation: r for r in results if not isinstance(r, SkippedRelation)}
    assert len(reports) == 7
    expected = {
        Relation.TRIPLE_SUM: o.ANCHOR_T1,
        Relation.TRIPLE_COMMUTATOR: o.ANCHOR_T2,
        Relation.TRIPLE_PAIRWISE: o.ANCHOR_T3,
        Relation.SUM_PLUS: o.ANCHOR_M1,
        Relation.SUM_MINUS: o.ANCHOR_M2,
        Relation.CHEN_FEI: o.ANCHOR_M3,
        Relation.SONG: o.ANCHOR_M4,
    }
    for rel, value in expected.items():
        assert reports[rel].rhs == pytest.approx(value, abs=1e-12)
        assert reports[rel].lhs == pytest.approx(2.0, abs=1e-12)
        assert reports[rel].holds


def test_evaluate_all_maximally_mixed():
    results = evaluate_all(pauli_triple(), MIXED)
    reports = {r.relation: r for r in results if not isinstance(r, SkippedRelation)}
    assert reports[Relation.TRIPLE_SUM].lhs == pytest.approx(3.0, abs=1e-12)
    assert reports[Relation.TRIPLE_COMMUTATOR].rhs == pytest.approx(0.0, abs=1e-12)
    assert reports[Relation.TRIPLE_PAIRWISE].rhs == pytest.approx(0.0, abs=1e-12)
    # all moments zero: each pair variance is 2, so both pair bounds give
    # (1/4) * 3 * 2 = 1.5
    assert reports[Relation.SUM_PLUS].rhs == pytest.approx(1.5, abs=1e-12)
    assert reports[Relation.SUM_MINUS].rhs == pytest.approx(1.5, abs=1e-12)


def test_evaluate_all_skips_triples_for_four_observables():
    obs, psi = random_instance(dim=2, n=4, seed=3)
    results = evaluate_all(obs, psi)
    skipped = {r.relation for r in results if isinstance(r, SkippedRelation)}
    present = {r.relation for r in results if not isinstance(r, SkippedRelation)}
    assert skipped == {
        Relation.TRIPLE_SUM,
        Relation.TRIPLE_COMMUTATOR,
        Relation.TRIPLE_PAIRWISE,
    }
    assert Relation.CHEN_FEI in present and Relation.SONG in present


def test_evaluate_all_skips_chen_fei_for_pairs():
    obs, psi = random_instance(dim=2, n=2, seed=5)
    results = evaluate_all(obs, psi)
    skipped = {r.relation for r in results if isinstance(r, SkippedRelation)}
    assert Relation.CHEN_FEI in skipped


def test_evaluate_all_shares_lhs():
    obs, psi = random_instance(dim=3, n=3, seed=8)
    results = evaluate_all(obs, psi)
    lhs_values = {r.lhs for r in results if not isinstance(r, SkippedRelation)}
    assert len(lhs_values) == 1


def test_evaluate_all_pairwise_reports():
    obs, psi = random_instance(dim=2, n=3, seed=6)
    results = evaluate_all(obs, psi, include_pairwise=True)
    pairs = [r for r in results if not isinstance(r, SkippedRelation) and r.pair is not None]
    by_relation = {}
    for rep in pairs:
        by_relation.setdefault(rep.relation, []).append(rep.pair)
    assert by_relation[Relation.ROBERTSON] == [(0, 1), (0, 2), (1, 2)]
    assert by_relation[Relation.MACCONE_PATI_ORTHOGONAL] == [(0, 1), (0, 2), (1, 2)]
    assert by_relation[Relation.MACCONE_PATI_DEVIATION] == [(0, 1), (0, 2), (1, 2)]
    assert all(rep.holds for rep in pairs)


def test_evaluate_all_pairwise_skips_on_mixed_state():
    results = evaluate_all(pauli_triple(), MIXED, include_pairwise=True)
    skipped = {r.relation for r in results if isinstance(r, SkippedRelation)}
    assert Relation.MACCONE_PATI_ORTHOGONAL in skipped
    assert Relation.MACCONE_PATI_DEVIATION in skipped
    robertson_pairs = [
        r for r in results
        if not isinstance(r, SkippedRelation) and r.relation is Relation.ROBERTSON
    ]
    assert len(robertson_pairs) == 3


def test_evaluate_all_skips_orthogonal_form_above_dim_two():
    obs, psi = random_instance(dim=3, n=3, seed=7)
    results = evaluate_all(obs, psi, include_pairwise=True)
    skipped = {r.relation for r in results if isinstance(r, SkippedRelation)}
    assert Relation.MACCONE_PATI_ORTHOGONAL in skipped
    deviation_pairs = [
        r for r in results
        if not isinstance(r, SkippedRelation)
        and r.relation is Relation.MACCONE_PATI_DEVIATION
    ]
    assert len(deviation_pairs) == 3


def test_commutator_ratio_between_triple_bounds():
    # The two commutator-driven triple bounds scale the same sum, so their
    # ratio is fixed at 2/sqrt(3) whenever the smaller one is nonzero.
    for seed in range(25):
        psi = random_pure_state(2, seed=seed)
        t2 = triple_commutator(SX, SY, SZ, psi)
        t3 = triple_pairwise(SX, SY, SZ, psi)
        if t3.rhs > 1e-12:
            assert t2.rhs == pytest.approx((2.0 / math.sqrt(3.0)) * t3.rhs, abs=1e-12)
