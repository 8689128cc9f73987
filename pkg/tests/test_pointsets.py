import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardybounds import (
    DomainError,
    PointSample,
    ValidationError,
    blaschke_sum,
    generate_sample,
    load_sample,
    non_blaschke_family,
    save_sample,
)
from hardybounds.pointsets import UnknownFamilyError, sample_from_dict, sample_to_dict

GENERATED = ("radial_harmonic", "radial_power", "spiral", "uniform_annulus")


class TestGenerate:
    def test_radial_harmonic_moduli(self):
        s = generate_sample("radial_harmonic", 3, {"angle": 0.0})
        np.testing.assert_allclose(s.points, [1 / 2, 2 / 3, 3 / 4], rtol=0, atol=1e-15)

    def test_radial_power_moduli(self):
        s = generate_sample("radial_power", 3, {"beta": 2.0, "angle": 0.0})
        np.testing.assert_allclose(s.points, [3 / 4, 8 / 9, 15 / 16], rtol=0, atol=1e-15)

    @pytest.mark.parametrize("family", GENERATED)
    def test_deterministic(self, family):
        a = generate_sample(family, 25, seed=7)
        b = generate_sample(family, 25, seed=7)
        assert a == b
        assert np.array_equal(a.points, b.points)

    def test_seed_changes_angles(self):
        a = generate_sample("radial_harmonic", 5, seed=1)
        b = generate_sample("radial_harmonic", 5, seed=2)
        assert not np.array_equal(a.points, b.points)
        np.testing.assert_allclose(np.abs(a.points), np.abs(b.points))

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(GENERATED), st.integers(1, 3000), st.integers(0, 2**31))
    def test_strict_interior(self, family, count, seed):
        s = generate_sample(family, count, seed=seed)
        assert np.all(np.abs(s.points) < 1.0)
        assert 1 <= len(s) <= count

    @pytest.mark.parametrize("family,params", [
        ("radial_power", {"beta": 0.0}),
        ("radial_power", {"beta": -1.0}),
        ("uniform_annulus", {"r_min": 0.9, "r_max": 0.5}),
        ("uniform_annulus", {"r_max": 1.0}),
    ])
    def test_bad_params(self, family, params):
        with pytest.raises(ValueError):
            generate_sample(family, 3, params)

    def test_bad_count(self):
        with pytest.raises(ValueError):
            generate_sample("spiral", 0)

    def test_unknown_family(self):
        with pytest.raises(UnknownFamilyError):
            generate_sample("fractal", 3)


class TestBlaschkeSum:
    def test_harmonic_prefix(self):
        s = generate_sample("radial_harmonic", 100, seed=3)
        oracle = math.fsum(1.0 / (j + 1) for j in range(1, 101))
        assert blaschke_sum(s) == pytest.approx(oracle, abs=1e-12)
        assert oracle == pytest.approx(math.fsum(1.0 / k for k in range(1, 102)) - 1.0, abs=1e-13)
        assert round(oracle, 4) == 4.1973
        assert s.non_blaschke

    def test_power_prefix(self):
        s = generate_sample("radial_power", 100, {"beta": 2.0}, seed=3)
        oracle = math.fsum(1.0 / (j + 1) ** 2 for j in range(1, 101))
        assert blaschke_sum(s) == pytest.approx(oracle, abs=1e-12)
        assert blaschke_sum(s) < math.pi**2 / 6 - 1
        assert not s.non_blaschke

    def test_empty(self):
        assert blaschke_sum(PointSample.build([])) == 0.0

    def test_family_flags(self):
        assert non_blaschke_family({"family": "radial_harmonic"})
        assert non_blaschke_family({"family": "radial_power", "params": {"beta": 1.0}})
        assert not non_blaschke_family({"family": "radial_power", "params": {"beta": 1.5}})
        assert not non_blaschke_family({"family": "explicit"})
        with pytest.raises(UnknownFamilyError):
            non_blaschke_family({"family": "nope"})

    def test_additive(self):
        a = generate_sample("uniform_annulus", 30, seed=1)
        b = generate_sample("uniform_annulus", 30, seed=2)
        assert blaschke_sum(a.concat(b)) == pytest.approx(blaschke_sum(a) + blaschke_sum(b), abs=1e-12)

    def test_cached_matches(self):
        s = generate_sample("spiral", 50)
        assert s.blaschke_partial_sum == pytest.approx(blaschke_sum(s), abs=1e-12)


class TestPointSample:
    def test_dedup(self):
        s = PointSample.build([0.1, 0.1 + 1e-14, 0.2j, 0.1])
        assert len(s) == 2

    def test_rejects_outside(self):
        with pytest.raises(DomainError):
            PointSample.build([0.5, 1.0])

    def test_rejects_bad_cache(self):
        with pytest.raises(ValidationError):
            PointSample(np.array([0.5]), {"family": "explicit", "params": {}, "seed": None}, 0.1)


class TestRoundTrip:
    @pytest.mark.parametrize("family", GENERATED)
    def test_bitwise(self, tmp_path, family):
        s = generate_sample(family, 40, seed=11)
        path = tmp_path / "s.json"
        save_sample(path, s)
        t = load_sample(path)
        assert t == s
        assert np.array_equal(t.points.view(np.uint64), s.points.view(np.uint64))
        assert t.blaschke_partial_sum == s.blaschke_partial_sum

    def test_human_readable(self, tmp_path):
        path = tmp_path / "s.json"
        save_sample(path, generate_sample("spiral", 3))
        data = json.loads(path.read_text())
        assert {"version", "family", "params", "seed", "points"} <= set(data)

    def test_rejects_point_on_circle(self, tmp_path):
        data = sample_to_dict(generate_sample("spiral", 3))
        data["points"].append([0.6, 0.8])
        data.pop("blaschke_partial_sum")
        with pytest.raises(ValidationError):
            sample_from_dict(data)

    def test_rejects_unknown_family(self):
        data = sample_to_dict(generate_sample("spiral", 3))
        data["family"] = "mystery"
        with pytest.raises(UnknownFamilyError, match="mystery"):
            sample_from_dict(data)

    def test_rejects_version(self):
        data = sample_to_dict(generate_sample("spiral", 3))
        data["version"] = 99
        with pytest.raises(ValidationError, match="version"):
            sample_from_dict(data)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError):
            load_sample(path)
        with pytest.raises(ValidationError):
            sample_from_dict({"version": 1, "family": "explicit", "points": [[1]]})
