import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcausal.distributions import all_ci, marginalize
from bellcausal.faithfulness import signalling_check
from bellcausal.independence import parse_statement
from bellcausal.quantum import BellSpec, BellSpecError, bell_joint, chsh_value, correlator, outcome_distribution, preset_spec

AGREE = 0.5 + 1 / (2 * math.sqrt(2))


def test_chsh_tables_at_half():
    spec = preset_spec("chsh", 0.5)
    for s in (0, 1):
        for t in (0, 1):
            tab = outcome_distribution(spec, s, t)
            agree = tab[0, 0] + tab[1, 1]
            want = 1 - AGREE if (s, t) == (1, 1) else AGREE
            assert abs(agree - want) <= 1e-9
    assert abs(chsh_value(spec) - 2 * math.sqrt(2)) <= 1e-9


def test_epr_tables():
    spec = preset_spec("epr", 0.5)
    assert np.allclose(outcome_distribution(spec, 0, 0), [[0.5, 0], [0, 0.5]], atol=1e-12)
    assert np.allclose(outcome_distribution(spec, 1, 1), [[0.5, 0], [0, 0.5]], atol=1e-12)
    assert np.allclose(outcome_distribution(spec, 0, 1), 0.25, atol=1e-12)
    assert abs(correlator(spec, 0, 1)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(
    st.floats(0, 1),
    st.lists(st.floats(-1, 1), min_size=12, max_size=12).filter(lambda c: all(sum(x * x for x in c[i : i + 3]) > 1e-3 for i in (0, 3, 6, 9))),
)
def test_quantum_invariants(p, coords):
    axes = []
    for i in (0, 3, 6, 9):
        v = np.array(coords[i : i + 3])
        axes.append(tuple(v / np.linalg.norm(v)))
    spec = BellSpec(p, (axes[0], axes[1]), (axes[2], axes[3]))
    for s in (0, 1):
        for t in (0, 1):
            tab = outcome_distribution(spec, s, t)
            assert tab.min() >= -1e-12
            assert abs(tab.sum() - 1) <= 1e-12
    sig = signalling_check(bell_joint(spec))
    assert sig == {"left": True, "right": True}
    assert abs(chsh_value(spec)) <= 2 * math.sqrt(2) + 1e-9


def test_settings_are_independent_in_joint():
    j = bell_joint(preset_spec("chsh", 0.3))
    st_ = marginalize(j, "ST")
    assert np.allclose(st_.probs, 0.25)


def test_epr_at_half_has_extra_independences():
    ci = all_ci(bell_joint(preset_spec("epr", 0.5)), "full_sets")
    assert parse_statement("AB ⊥ S") in ci
    assert parse_statement("AB ⊥ T") in ci


def test_bad_specs():
    with pytest.raises(BellSpecError):
        preset_spec("ghz")
    with pytest.raises(BellSpecError):
        preset_spec("chsh", 1.5)
    with pytest.raises(BellSpecError):
        BellSpec(0.5, ((1, 1, 0), (0, 0, 1)), ((0, 0, 1), (0, 0, 1)))
