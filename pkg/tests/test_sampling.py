"""Grids and quasi-random sequences: determinism, membership, coverage."""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elliptica import SamplingSpec, disk_net, halton, halton_disk, polar_grid


class TestPolarGrid:
    def test_layout(self):
        pts = polar_grid(0.5, 4, 8)
        assert pts.shape == (33,)
        assert pts[0] == 0.0
        # ring-major ordering: first ring at radius/n_r, angle 0
        assert pts[1] == pytest.approx(0.125)
        # outermost ring sits at the requested radius (1 ulp from the
        # complex exponential is the only slack)
        assert np.max(np.abs(pts)) == pytest.approx(0.5, abs=1e-15)
        assert abs(pts[-8]) == 0.5  # the theta = 0 rim sample is exact

    def test_no_center(self):
        pts = polar_grid(0.9, 3, 8, include_center=False)
        assert pts.shape == (24,)
        assert np.min(np.abs(pts)) > 0.0

    def test_no_duplicates(self):
        pts = polar_grid(0.7, 16, 64)
        assert len(np.unique(np.round(pts, 15))) == len(pts)

    def test_deterministic(self):
        a = polar_grid(0.999, 48, 192)
        b = polar_grid(0.999, 48, 192)
        assert np.array_equal(a, b)

    def test_rejects_nonpositive_radius(self):
        with pytest.raises(ValueError):
            polar_grid(0.0, 4, 8)


class TestHalton:
    def test_base2_prefix(self):
        # radical inverse of 1,2,3,4 in base 2
        assert np.allclose(halton(4, 2), [0.5, 0.25, 0.75, 0.125], atol=0, rtol=0)

    def test_start_offset_is_a_shift(self):
        full = halton(10, 3)
        shifted = halton(7, 3, start=4)
        assert np.array_equal(full[3:], shifted)

    def test_open_interval(self):
        u = halton(500, 5)
        assert np.all(u > 0.0) and np.all(u < 1.0)

    @given(st.integers(min_value=0, max_value=50))
    def test_count(self, n):
        assert halton(n, 2).shape == (n,)

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            halton(-1, 2)


class TestHaltonDisk:
    def test_membership(self):
        pts = halton_disk(0.2 + 0.1j, 0.3, 400)
        assert np.all(np.abs(pts - (0.2 + 0.1j)) < 0.3)

    def test_area_uniform_mean_radius(self):
        # for the uniform disk law E|z - c| = (2/3) radius
        pts = halton_disk(0.0, 1.0, 4000)
        assert abs(np.mean(np.abs(pts)) - 2.0 / 3.0) < 0.01

    def test_deterministic_and_start_sensitive(self):
        a = halton_disk(0.0, 1.0, 64)
        b = halton_disk(0.0, 1.0, 64)
        c = halton_disk(0.0, 1.0, 64, start=65)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, c)


class TestDiskNet:
    def test_membership_and_center(self):
        net = disk_net(0.3, 0.05)
        assert net[0] == 0.0
        assert np.all(np.abs(net) < 0.3)  # rim ring pulled strictly inside

    def test_rim_ring_present(self):
        net = disk_net(0.25, 0.04)
        assert np.max(np.abs(net)) == pytest.approx(0.25, rel=1e-8)

    def test_covering(self):
        # every point of the disk lies within one spacing of the net;
        # the ring layout actually achieves about 0.68 * spacing
        rho, spacing = 0.3, 0.05
        net = disk_net(rho, spacing)
        rng = np.random.default_rng(11)
        probes = rho * np.sqrt(rng.random(2000)) * np.exp(2j * np.pi * rng.random(2000))
        dist = np.abs(probes[:, None] - net[None, :]).min(axis=1)
        assert float(dist.max()) <= spacing

    def test_spacing_larger_than_disk(self):
        net = disk_net(0.05, 0.2)
        assert net[0] == 0.0
        assert len(net) >= 9  # center plus the rim ring

    def test_validation(self):
        with pytest.raises(ValueError):
            disk_net(0.0, 0.1)
        with pytest.raises(ValueError):
            disk_net(0.1, 0.0)


class TestSamplingSpec:
    def test_defaults(self):
        spec = SamplingSpec()
        assert (spec.n_r, spec.n_theta, spec.refinement_rounds) == (48, 192, 3)

    @pytest.mark.parametrize("kwargs", [
        {"n_r": 0}, {"n_theta": 3}, {"refinement_rounds": -1}, {"n_r": 2.5},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SamplingSpec(**kwargs)
