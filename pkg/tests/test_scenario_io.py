"""Scenario generation and JSON persistence round trips."""

import json

import numpy as np
import pytest

from strumer.scenario import (
    generate_scenario,
    load_scenario,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
)
from strumer.signals import MaskSpec


def _gmm_scenario(seed=3):
    return generate_scenario(
        [-0.2, 0.1, 0.11],
        45,
        3,
        10.0,
        noise_kind="gmm",
        mask_spec=MaskSpec("element", fraction=0.8),
        g="masked_lp",
        p=1.1,
        seed=seed,
    )


def test_generation_is_deterministic():
    a = _gmm_scenario()
    b = _gmm_scenario()
    assert np.array_equal(a.observation.y, b.observation.y)
    assert np.array_equal(a.truth.S, b.truth.S)
    assert np.array_equal(a.observation.mask.omega, b.observation.mask.omega)
    c = _gmm_scenario(seed=4)
    assert not np.array_equal(a.observation.y, c.observation.y)


def test_amplitudes_have_unit_power():
    sc = generate_scenario([0.1], 15, 4000, 10.0, seed=0)
    assert np.mean(np.abs(sc.truth.S) ** 2) == pytest.approx(1.0, rel=0.1)


def test_round_trip_through_json_is_bit_exact(tmp_path):
    sc = _gmm_scenario()
    path = tmp_path / "scenario.json"
    save_scenario(path, sc)
    back = load_scenario(path)
    assert np.array_equal(back.observation.y, sc.observation.y)
    assert np.array_equal(back.observation.mask.omega, sc.observation.mask.omega)
    assert np.array_equal(back.truth.f, sc.truth.f)
    assert np.array_equal(back.truth.S, sc.truth.S)
    assert back.noise.kind == "gmm"
    assert back.noise.sigma2 == sc.noise.sigma2
    assert back.observation.objective.g == "masked_lp"
    assert back.observation.objective.p == 1.1
    assert back.snr_db == sc.snr_db and back.seed == sc.seed
    # a second hop produces the identical document
    assert scenario_to_dict(back) == scenario_to_dict(sc)


def test_complex_pairs_and_mask_bits_schema():
    sc = _gmm_scenario()
    doc = scenario_to_dict(sc)
    assert doc["format"] == "strumer-scenario/1"
    y00 = doc["observations"][0][0]
    assert isinstance(y00, list) and len(y00) == 2
    bits = doc["mask"]["bits"]
    assert set(bits) <= {0, 1}
    assert len(bits) == 45 * 3
    json.dumps(doc)  # JSON-serializable as is


def test_rejects_malformed_documents():
    doc = scenario_to_dict(_gmm_scenario())
    bad = dict(doc, format="something-else")
    with pytest.raises(ValueError, match="format"):
        scenario_from_dict(bad)
    bad = json.loads(json.dumps(doc))
    bad["mask"]["bits"] = bad["mask"]["bits"][:-1]
    with pytest.raises(ValueError, match="bit count"):
        scenario_from_dict(bad)
    bad = json.loads(json.dumps(doc))
    # nonzero value outside the mask
    flat = np.asarray(bad["mask"]["bits"]).reshape(45, 3)
    i, j = np.argwhere(~flat.astype(bool))[0]
    bad["observations"][i][j] = [1.0, 0.0]
    with pytest.raises(ValueError, match="outside the mask"):
        scenario_from_dict(bad)


def test_truthless_document_loads():
    doc = scenario_to_dict(_gmm_scenario())
    doc["truth"] = None
    doc["noise"] = None
    sc = scenario_from_dict(doc)
    assert sc.truth is None and sc.noise is None
