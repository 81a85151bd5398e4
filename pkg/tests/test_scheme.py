import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glsdim import (ConfigError, DeltaInfinityError, ExplicitWeights,
                    GLSScheme, Placement, make_family, scheme_from_config,
                    validate_scheme)


def scheme_variants():
    fams = {
        "luroth": make_family("luroth"),
        "geometric": make_family("geometric", ratio=0.5),
        "golden": make_family("golden"),
    }
    out = {}
    for name, fam in fams.items():
        out[f"{name}-asc"] = GLSScheme(fam)
        out[f"{name}-perm"] = GLSScheme(fam, Placement.permuted([2, 0, 1]))
    return out


VARIANTS = scheme_variants()


@pytest.fixture(params=sorted(VARIANTS))
def any_scheme(request):
    return VARIANTS[request.param]


class TestCylinders:
    def test_first_luroth_cylinder(self, luroth_scheme):
        c = luroth_scheme.cylinder((0,))
        assert c.left == 0.0 and c.length == 0.5

    def test_luroth_rank2_by_hand(self, luroth_scheme):
        # left(1,0) = a_1 + q_1 * a_0 = 1/2, length = q_1 q_0 = 1/12
        c = luroth_scheme.cylinder((1, 0))
        assert c.left == 0.5
        assert c.length == pytest.approx(1 / 12, rel=1e-15)

    def test_rank1_is_the_base_interval(self, any_scheme):
        for i in range(6):
            c = any_scheme.cylinder((i,))
            assert c.left == any_scheme.left_of(i)
            assert c.length == any_scheme.weights.weight(i)

    def test_multiplicativity_is_bitwise(self, any_scheme):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(1, 13))
            d = tuple(int(v) for v in rng.integers(0, 21, size=n))
            c = any_scheme.cylinder(d)
            prod = 1.0
            for i in d:
                prod *= any_scheme.weights.weight(i)
            assert c.length == prod

    def test_nesting(self, any_scheme):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(1, 11))
            d = tuple(int(v) for v in rng.integers(0, 15, size=n))
            j = int(rng.integers(0, 15))
            parent = any_scheme.cylinder(d)
            child = any_scheme.cylinder(d + (j,))
            assert child.left >= parent.left - 1e-14
            assert child.right <= parent.right + 1e-14

    def test_rank1_packing_recurrence_exact(self, any_scheme):
        layout = any_scheme._layout
        layout._grow_to(300)
        cum, widths = layout._cum, layout._widths
        for p in range(300):
            assert cum[p] < cum[p + 1]
            assert cum[p] + widths[p] == cum[p + 1]

    def test_self_similarity_of_placement(self, any_scheme):
        for i, j in itertools.product(range(0, 51, 7), range(0, 51, 11)):
            left = any_scheme.cylinder((i, j)).left
            expected = any_scheme.left_of(i) + any_scheme.weights.weight(i) * any_scheme.left_of(j)
            assert left == expected


class TestCodec:
    def test_zero_encodes_to_leftmost(self, luroth_scheme):
        assert luroth_scheme.encode(0.0, 5) == (0, 0, 0, 0, 0)

    def test_shared_endpoint_goes_right(self, luroth_scheme):
        assert luroth_scheme.encode(0.5, 1) == (1,)
        assert luroth_scheme.encode(0.5, 3) == (1, 0, 0)

    def test_one_has_no_expansion(self, luroth_scheme):
        with pytest.raises(DeltaInfinityError) as exc:
            luroth_scheme.encode(1.0, 1)
        assert exc.value.rank == 1

    def test_decode_examples(self, luroth_scheme):
        assert luroth_scheme.decode((0,) * 8) == 0.0
        assert luroth_scheme.decode((1,)) == 0.5

    def test_roundtrip_error_bounded_by_cylinder(self, any_scheme):
        rng = np.random.default_rng(12345)
        n = 20
        q_max_n = any_scheme.q_max ** n
        for x in rng.random(1000):
            digits = any_scheme.encode(float(x), n)
            cyl = any_scheme.cylinder(digits)
            assert abs(cyl.left - x) <= cyl.length
            assert cyl.length <= q_max_n

    def test_encode_boundary_membership(self, geometric_scheme):
        # each left endpoint belongs to its own cylinder under the tie-break
        for i in range(1, 8):
            a_i = geometric_scheme.left_of(i)
            assert geometric_scheme.encode(a_i, 1) == (i,)

    def test_finite_alphabet_right_edge(self, thirds_scheme):
        # x = 1 sits in the closed last cylinder of a finite alphabet
        assert thirds_scheme.encode(1.0, 2) == (2, 2)

    def test_input_validation(self, luroth_scheme):
        with pytest.raises(ValueError):
            luroth_scheme.encode(1.5, 3)
        with pytest.raises(ValueError):
            luroth_scheme.encode(0.5, 0)
        with pytest.raises(ValueError):
            luroth_scheme.decode(())
        with pytest.raises(ValueError):
            luroth_scheme.decode((1, -2))

    @given(st.floats(min_value=0.0, max_value=1.0, exclude_max=True))
    @settings(max_examples=200, deadline=None)
    def test_roundtrip_property_luroth(self, x):
        scheme = VARIANTS["luroth-asc"]
        digits = scheme.encode(x, 8)
        cyl = scheme.cylinder(digits)
        assert cyl.left - 1e-15 <= x <= cyl.right + 1e-15
        assert scheme.decode(digits) == cyl.left


class TestPermutedPlacement:
    def test_prefix_reorders_lefts(self):
        fam = make_family("explicit", values=[0.2, 0.3, 0.5])
        scheme = GLSScheme(fam, Placement.permuted([2, 0, 1]))
        # order 2,0,1: lefts 0, 0.5, 0.7
        assert scheme.left_of(2) == 0.0
        assert scheme.left_of(0) == 0.5
        assert scheme.left_of(1) == pytest.approx(0.7)

    def test_beyond_prefix_is_ascending(self):
        fam = make_family("geometric", ratio=0.5)
        perm = GLSScheme(fam, Placement.permuted([1, 0]))
        asc = GLSScheme(fam)
        for i in range(2, 10):
            assert perm.left_of(i) == asc.left_of(i)

    def test_bad_prefix_rejected(self):
        with pytest.raises(ConfigError):
            Placement.permuted([0, 2])
        with pytest.raises(ConfigError):
            Placement("ascending", (1, 0))


class TestValidation:
    def test_good_schemes_pass(self, any_scheme):
        assert validate_scheme(any_scheme).passed

    def test_thirds_passes(self, thirds_scheme):
        report = validate_scheme(thirds_scheme)
        assert report.passed
        assert {c.name for c in report.checks} >= {"mass", "rank1_packing"}

    def test_bad_mass_reported_not_raised(self):
        fam = ExplicitWeights([0.5, 0.6], check_mass=False)
        report = validate_scheme(GLSScheme(fam))
        assert not report.passed
        failed = {c.name for c in report.checks if not c.passed}
        assert "mass" in failed


GOOD_CONFIG = {
    "weights": {"kind": "geometric", "ratio": 0.5},
    "placement": {"order": "ascending"},
}


class TestConfig:
    def test_good_config(self):
        scheme = scheme_from_config(GOOD_CONFIG)
        assert scheme.weights.kind == "geometric"

    def test_placement_defaults_to_ascending(self):
        scheme = scheme_from_config({"weights": {"kind": "luroth"}})
        assert scheme.placement.order == "ascending"

    def test_permuted_config(self):
        scheme = scheme_from_config({
            "weights": {"kind": "golden"},
            "placement": {"order": "permuted", "prefix": [1, 0]},
        })
        assert scheme.placement.prefix == (1, 0)

    @pytest.mark.parametrize("cfg,fragment", [
        ({"weights": {"kind": "luroth"}, "extra": 1}, "unknown config keys"),
        ({"placement": {"order": "ascending"}}, "weights"),
        ({"weights": {"kind": "luroth", "ratio": 0.5}}, "unknown keys"),
        ({"weights": {"kind": "geometric"}}, "ratio"),
        ({"weights": {"kind": "geometric", "ratio": "x"}}, "ratio"),
        ({"weights": {"kind": "weird"}}, "kind"),
        ({"weights": {"kind": "explicit", "values": "no"}}, "values"),
        ({"weights": {"kind": "luroth"}, "placement": {"order": "sideways"}}, "order"),
        ({"weights": {"kind": "luroth"},
          "placement": {"order": "ascending", "prefix": [0]}}, "unknown keys"),
        ({"weights": {"kind": "luroth"},
          "placement": {"order": "permuted", "prefix": "x"}}, "prefix"),
    ])
    def test_malformed_configs_name_the_field(self, cfg, fragment):
        with pytest.raises(ConfigError, match=fragment):
            scheme_from_config(cfg)

    def test_load_scheme_roundtrip(self, tmp_path):
        path = tmp_path / "scheme.json"
        path.write_text(json.dumps(GOOD_CONFIG))
        from glsdim import load_scheme
        assert load_scheme(path).weights.ratio == 0.5

    def test_load_scheme_bad_json(self, tmp_path):
        path = tmp_path / "scheme.json"
        path.write_text("{nope")
        from glsdim import load_scheme
        with pytest.raises(ConfigError, match="JSON"):
            load_scheme(path)
