import pytest
from hypothesis import given, strategies as st

import oracles
from helpers import binary_common, blind_channel, no_interference_hk
from icregions.bounds import (
    ConformanceError,
    ConstantSet,
    bound_constants,
    check_conformance,
    constant_names,
    constant_relations,
    subchannel_rates,
)
from icregions.demo import example_spec
from icregions.probspace import build_joint, wyner_lift
from icregions.sampling import random_spec, seeded

seeds = st.integers(0, 10_000)


@pytest.mark.parametrize("family", ["HK", "HOD", "CMG", "MOD_CMG", "HOD_CMG"])
@given(seed=seeds)
def test_constants_match_definitions(family, seed):
    sp = random_spec(family, seeded(seed, 7), max_card=2)
    names, pmf = oracles.joint_dict(sp)
    ours = bound_constants(family, build_joint(sp))
    ref = oracles.constants(family, names, pmf)
    assert set(ref) == set(ours.names)
    for k, v in ref.items():
        assert ours[k] == pytest.approx(max(v, 0.0), abs=1e-9), k


def test_no_interference_constants():
    c = bound_constants("HK", build_joint(no_interference_hk()))
    expect = dict(a=1, b=1, c=0, d=2, e=1, f=1, g=2)
    for i in (1, 2):
        for k, v in expect.items():
            assert c[f"{k}{i}"] == pytest.approx(v, abs=1e-12)


def test_blind_channel_gives_zeros():
    for fam in ("HK", "HOD"):
        c = bound_constants(fam, build_joint(blind_channel(no_interference_hk())) if fam == "HK" else
                            wyner_lift(build_joint(blind_channel(no_interference_hk())), [binary_common()]))
        # HOD keeps the binning charge on B, C, F only
        for k in c.names:
            want = 1.0 if fam == "HOD" and k in ("B1", "C1", "F1") else 0.0
            assert c[k] == pytest.approx(want, abs=1e-12), k


def test_lift_adds_one_bit_to_correlated_constants():
    base = build_joint(no_interference_hk())
    lo = bound_constants("HK", base)
    hi = bound_constants("HOD", wyner_lift(base, [binary_common(1)]))
    assert hi["B1"] == pytest.approx(lo["b1"] + 1.0, abs=1e-12)
    assert hi.correlation[0] == pytest.approx(1.0, abs=1e-12)
    assert hi["A1"] == pytest.approx(lo["a1"], abs=1e-12)


def test_hk_rejects_dependent_pair():
    d = build_joint(example_spec())
    with pytest.raises(ConformanceError):
        check_conformance("HK", d)
    check_conformance("HOD", d)


def test_constant_set_text_round_trip():
    c = bound_constants("HOD", build_joint(random_spec("HOD", seeded(4, 8))))
    back = ConstantSet.from_text(c.to_text())
    assert back.family == c.family
    for k in c.names:
        assert back[k] == pytest.approx(c[k], rel=1e-11, abs=1e-12)


def test_constant_set_rejects_missing_names():
    with pytest.raises(ValueError, match="missing"):
        ConstantSet("HK", {"a1": 1.0})


def test_zero_constants_satisfy_every_relation_with_equality():
    for fam, cons in (("HK", "HK"), ("CMG", "CMG"), ("MOD_CMG", "MOD_CMG"), ("HOD", "HOD"), ("HOD_CMG", "HOD_CMG")):
        r = constant_relations(fam, ConstantSet.zeros(cons))
        assert r.all_hold
        assert all(ch.lhs == ch.rhs for ch in r.checks)


def test_relation_family_checks_input_sets():
    with pytest.raises(ValueError):
        constant_relations("HK", ConstantSet.zeros("HOD"))
    with pytest.raises(ValueError):
        constant_relations("nope", ConstantSet.zeros("HK"))


@given(seeds)
def test_hk_polymatroid_relations(seed):
    d = build_joint(random_spec("HK", seeded(seed, 9)))
    c = bound_constants("HK", d)
    assert constant_relations("HK", c).all_hold
    assert constant_relations("HK_INDEPENDENCE", c).all_hold
    assert c["a1"] <= c["d1"] + 1e-9 <= c["a1"] + c["b1"] + 2e-9


@given(seeds)
def test_lift_dominance(seed):
    rng = seeded(seed, 10)
    base = build_joint(random_spec("HK", rng))
    lifted = wyner_lift(base, [binary_common(1), binary_common(2)])
    assert constant_relations("LIFT", (bound_constants("HK", base), bound_constants("HOD", lifted))).all_hold


def test_constant_names_per_family():
    assert len(constant_names("HK")) == 14
    assert len(constant_names("CMG")) == 12
    assert "cp1" in constant_names("MOD_CMG")


def test_subchannel_separate_equals_superposition_sum():
    d = build_joint(random_spec("HK", seeded(1, 11))).marginal(("Q", "U1", "W1", "X1", "Y1"))
    sep = subchannel_rates("separate", d, "U1", "W1", "X1", "Y1")
    sup = subchannel_rates("superposition", d, "U1", "W1", "X1", "Y1")
    assert sep[-1].value == pytest.approx(sup[-1].value, abs=1e-12)


def test_subchannel_binning_pays_for_correlation():
    d = build_joint(example_spec())
    with pytest.raises(ConformanceError):
        subchannel_rates("separate", d, "U1", "W1", "X1", "Y1")
    b = subchannel_rates("binning", d, "U1", "W1", "X1", "Y1")
    assert b[-1].value == pytest.approx(3.65563906223, abs=1e-9)


def test_subchannel_unknown_scheme():
    d = build_joint(example_spec())
    with pytest.raises(ValueError):
        subchannel_rates("magic", d, "U1", "W1", "X1", "Y1")


def test_blind_output_subchannel_is_zero():
    d = build_joint(blind_channel(no_interference_hk()))
    for scheme in ("separate", "superposition"):
        assert all(abs(r.value) < 1e-12 for r in subchannel_rates(scheme, d, "U1", "W1", "X1", "Y1"))
