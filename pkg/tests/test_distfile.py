import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from icregions.demo import example_spec, shipped_spec
from icregions.distfile import DistFileError, dump, dumps, load, loads, parse_dist
from icregions.probspace import DistributionError, Family, build_joint
from icregions.sampling import random_common_parts, random_spec, seeded

HK_TEXT = """{
 "family": "HK",
 "factors": [
  {"child": ["Q"], "parents": [], "table": ["1"]},
  {"child": ["U1"], "parents": ["Q"], "table": ["1/2", "1/2"]},
  {"child": ["W1"], "parents": ["Q"], "table": ["1"]},
  {"child": ["U2"], "parents": ["Q"], "table": ["1"]},
  {"child": ["W2"], "parents": ["Q"], "table": ["1"]}
 ],
 "variables": [{"name": "Q", "cardinality": 1}, {"name": "U1", "cardinality": 2},
               {"name": "W1", "cardinality": 1}, {"name": "U2", "cardinality": 1},
               {"name": "W2", "cardinality": 1}, {"name": "X1", "cardinality": 2},
               {"name": "X2", "cardinality": 1}, {"name": "Y1", "cardinality": 2},
               {"name": "Y2", "cardinality": 1}],
 "encoders": [
  {"child": "X1", "parents": ["Q", "U1", "W1"], "map": [0, 1]},
  {"child": "X2", "parents": ["Q", "U2", "W2"], "map": [0]}
 ],
 "channel": {"child": ["Y1", "Y2"], "parents": ["X1", "X2"], "table": ["1", "0", "0", "1"]}
}
"""


def test_well_formed_file():
    spec = loads(HK_TEXT).spec
    assert spec.family == Family.HK
    assert build_joint(spec).entropy("Y1") == pytest.approx(1.0)


def test_row_sum_error():
    bad = HK_TEXT.replace('"table": ["1/2", "1/2"]', '"table": ["1/32", "30/32"]')
    with pytest.raises(DistributionError, match="row sum ≠ 1"):
        loads(bad)


def test_syntax_error_position():
    bad = HK_TEXT.replace('"family": "HK",', '"family": "HK"')
    with pytest.raises(DistFileError, match=r"<string>:3:\d+: syntax error"):
        loads(bad)


@pytest.mark.parametrize("edit, message", [
    (('"HK"', '"XX"'), "unknown family"),
    (('"map": [0, 1]', '"map": [0, 2]'), "not a valid output index"),
    (('"table": ["1/2", "1/2"]', '"table": [0.5, 0.5]'), "probabilities must be strings"),
    (('"table": ["1/2", "1/2"]', '"table": ["1/2"]'), "dimension mismatch"),
    (('"parents": ["Q"], "table": ["1/2"', '"parents": ["Z"], "table": ["1/2"'), "undeclared variable"),
    (('"family"', '"famliy"'), "unknown keys"),
])
def test_semantic_errors(edit, message):
    with pytest.raises(DistFileError, match=message):
        loads(HK_TEXT.replace(*edit))


def test_missing_channel():
    doc = json.loads(HK_TEXT)
    del doc["channel"]
    with pytest.raises(DistFileError, match="channel"):
        loads(json.dumps(doc))


def test_unreadable_path(tmp_path):
    with pytest.raises(DistFileError):
        load(tmp_path / "absent.json")
    p = tmp_path / "latin.json"
    p.write_bytes(b"\xff\xfe{")
    with pytest.raises(DistFileError, match="UTF-8"):
        load(p)


def _tables(spec):
    return [(f.child, f.parents, [Fraction(v) for v in f.table.ravel()]) for f in spec.all_factors()]


@given(st.integers(0, 10_000), st.sampled_from(["HK", "HOD", "CMG", "MOD_CMG", "HOD_CMG"]))
def test_exact_round_trip(seed, family):
    rng = seeded(seed, 31)
    spec = random_spec(family, rng)
    parts = random_common_parts(rng) if family == "HK" else []
    back = loads(dumps(spec, parts))
    assert _tables(back.spec) == _tables(spec)
    assert [(c.u, c.w, c.name, list(c.table.table.ravel())) for c in back.common] == \
           [(c.u, c.w, c.name, list(c.table.table.ravel())) for c in parts]
    assert dumps(back.spec, back.common) == dumps(spec, parts)


def test_dump_and_parse(tmp_path):
    p = tmp_path / "ex.json"
    dump(p, example_spec())
    spec = parse_dist(p)
    assert np.array_equal(build_joint(spec).probs, build_joint(example_spec()).probs)
    assert p.read_bytes().count(b"\r") == 0


def test_shipped_example_matches_construction():
    a, b = build_joint(shipped_spec()), build_joint(example_spec())
    assert a.names == b.names
    assert np.array_equal(a.numerators, b.numerators) and a.denominator == b.denominator


def test_lifted_data_file_has_common_section():
    from importlib import resources

    text = resources.files("icregions").joinpath("data/lifted.json").read_text(encoding="utf-8")
    df = loads(text)
    assert df.lifted and len(df.common) == 2
