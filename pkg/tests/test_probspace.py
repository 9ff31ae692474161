from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from icregions.probspace import (
    CommonPart,
    DistributionError,
    Factor,
    FactorSpec,
    Family,
    InfoQuery,
    JointDist,
    VariableDecl,
    build_joint,
    collapse,
    cond_mutual_info,
    entropy,
    mutual_info,
    swap_senders,
    verify_markov,
    wyner_lift,
)
from icregions.sampling import random_spec, seeded

seeds = st.integers(0, 10_000)
families = st.sampled_from(["HK", "HOD", "CMG", "MOD_CMG", "HOD_CMG"])


def _bit_pair():
    decls = [VariableDecl("A", 2), VariableDecl("B", 2)]
    return JointDist.from_table(decls, [["1/2", "0"], ["0", "1/2"]])


def test_copied_bit_entropies():
    d = _bit_pair()
    assert entropy(d, "A") == pytest.approx(1.0, abs=1e-12)
    assert entropy(d, ("A", "B")) == pytest.approx(1.0, abs=1e-12)
    assert mutual_info(d, "A", "B") == pytest.approx(1.0, abs=1e-12)
    assert entropy(d, "A", "B") == pytest.approx(0.0, abs=1e-12)


def test_masses_must_sum_to_one():
    with pytest.raises(DistributionError, match="sum"):
        JointDist.from_table([VariableDecl("A", 2)], ["1/2", "1/4"])


def test_factor_row_sum_reported():
    with pytest.raises(DistributionError, match="row sum ≠ 1"):
        Factor(("A",), (), ["1/32", "30/32"])


def test_float_probabilities_rejected():
    with pytest.raises(DistributionError):
        Factor(("A",), (), [0.5, 0.5])


def test_nondeterministic_encoder_rejected():
    sp = random_spec("HK", seeded(1, 0))
    enc = sp.encoders[0]
    soft = np.full(enc.table.shape, Fraction(1, enc.table.shape[-1]), dtype=object)
    with pytest.raises(DistributionError, match="deterministic"):
        FactorSpec(sp.family, sp.factors, (Factor(enc.child, enc.parents, soft),) + sp.encoders[1:], sp.channel)


def test_query_on_unknown_variable():
    d = _bit_pair()
    with pytest.raises(DistributionError):
        cond_mutual_info(d, InfoQuery(("A",), ("Z",), ()))


def test_markov_chain_detection():
    d = build_joint(random_spec("CMG", seeded(3, 1)))
    q = ("Q",)
    assert verify_markov(d, "W1", ("X1", "W2") + q, "Y1").holds
    # a copied bit is never independent of itself given nothing
    assert not verify_markov(_bit_pair(), "A", (), "B").holds


@given(seeds, families)
def test_joint_matches_bruteforce(seed, family):
    sp = random_spec(family, seeded(seed, 0), max_card=2)
    d = build_joint(sp)
    names, pmf = oracles.joint_dict(sp)
    m = d.marginal(names)
    for assign, p in pmf.items():
        assert m.mass(assign) == p
    assert sum(pmf.values()) == 1


@given(seeds)
def test_cmi_matches_bruteforce(seed):
    sp = random_spec("HOD", seeded(seed, 1), max_card=2)
    d = build_joint(sp)
    names, pmf = oracles.joint_dict(sp)
    for left, right, giv in [
        (("U1",), ("W1",), ("Q",)),
        (("U1", "W2"), ("Y1",), ("W1", "Q")),
        (("X1", "X2"), ("Y2",), ()),
    ]:
        ours = mutual_info(d, left, right, giv)
        ref = oracles.I(names, pmf, left, right, giv)
        assert ours == pytest.approx(ref, abs=1e-10)
        assert ours >= 0


@given(seeds)
def test_trivial_lift_changes_nothing(seed):
    d = build_joint(random_spec("HK", seeded(seed, 2)))
    parts = [CommonPart(f"U{i}", f"W{i}", Factor((f"K{i}",), (), [1])) for i in (1, 2)]
    lifted = wyner_lift(d, parts)
    assert lifted.names == d.names
    assert np.array_equal(lifted.probs, d.probs)


def test_lift_adds_exactly_entropy_of_common_part():
    d = build_joint(random_spec("HK", seeded(5, 3)))
    lifted = wyner_lift(d, [CommonPart.uniform("U1", "W1", 4, "K1")])
    q = ("Q",)
    assert mutual_info(lifted, "U1", "W1", q) == pytest.approx(mutual_info(d, "U1", "W1", q) + 2.0, abs=1e-9)
    assert entropy(lifted, "U1") == pytest.approx(entropy(d, "U1") + 2.0, abs=1e-9)
    # channel relation untouched
    assert mutual_info(lifted, ("X1", "X2"), "Y1") == pytest.approx(mutual_info(d, ("X1", "X2"), "Y1"), abs=1e-12)


def test_collapse_drops_auxiliaries():
    d = build_joint(random_spec("HOD", seeded(2, 4)))
    c = collapse(d)
    assert "U1" not in c.names and "U2" not in c.names
    assert entropy(c, ("X1", "Y1")) == pytest.approx(entropy(d, ("X1", "Y1")), abs=1e-12)


def test_swap_senders_mirrors_information():
    sp = random_spec("HOD", seeded(9, 5))
    a, b = build_joint(sp), build_joint(swap_senders(sp))
    assert mutual_info(a, "U1", "Y1", ("W1",)) == pytest.approx(mutual_info(b, "U2", "Y2", ("W2",)), abs=1e-12)


def test_family_shape_enforced():
    sp = random_spec("HK", seeded(0, 6))
    with pytest.raises(DistributionError):
        FactorSpec(Family.CMG, sp.factors, sp.encoders, sp.channel)
