import csv
import math

import numpy as np
import pytest

from isomlab.errors import AdmissibilityError, WallError
from isomlab.geometry import (
    classify_point,
    epsilon_bound,
    is_admissible,
    rays_to_csv,
    same_cell,
    sector_bounds,
    stokes_ray_directions,
    wall_hits,
    wall_hits_to_csv,
)


class TestStokesRays:
    def test_real_pair(self):
        rays = stokes_ray_directions([0.0, 1.0])
        got = {(r.i, r.j): r.theta for r in rays.rays}
        assert abs(got[(0, 1)] - math.pi / 2) < 1e-12
        assert abs(got[(1, 0)] - 3 * math.pi / 2) < 1e-12

    def test_rotated_pair(self):
        rays = stokes_ray_directions([0.0, 1.0j])
        got = {(r.i, r.j): r.theta for r in rays.rays}
        assert abs(got[(0, 1)] - 0.0) < 1e-12
        assert abs(got[(1, 0)] - math.pi) < 1e-12

    def test_collinear_triple(self):
        rays = stokes_ray_directions([0.0, 1.0, 2.0])
        thetas = sorted({round(r.theta, 12) for r in rays.rays})
        assert thetas == [round(math.pi / 2, 12), round(3 * math.pi / 2, 12)]

    def test_antipodal_pairs(self):
        rng = np.random.default_rng(3)
        u = rng.normal(size=4) + 1j * rng.normal(size=4)
        rays = {(r.i, r.j): r.theta for r in stokes_ray_directions(u).rays}
        for (i, j), th in rays.items():
            partner = rays[(j, i)]
            assert abs((partner - th) % (2 * math.pi) - math.pi) < 1e-9

    def test_subclass_filter(self):
        uC = [0.0, 0.0, 1.0]
        u = [0.01, -0.01, 1.0]
        rays = stokes_ray_directions(u, subclass_at=uC)
        pairs = {(r.i, r.j) for r in rays.rays}
        assert (0, 1) not in pairs and (1, 0) not in pairs

    def test_all_equal_rejected(self):
        with pytest.raises(WallError):
            stokes_ray_directions([1.0, 1.0])


class TestAdmissibility:
    def test_clear_direction(self):
        adm = is_admissible(0.0, [0.0, 1.0])
        assert adm.admissible
        assert abs(adm.margin - math.pi / 2) < 1e-12

    def test_exact_ray_hit(self):
        assert not is_admissible(math.pi / 2, [0.0, 1.0])

    def test_within_tolerance(self):
        assert not is_admissible(math.pi / 2 + 1e-12, [0.0, 1.0], tol=1e-8)

    def test_pi_periodicity(self):
        rng = np.random.default_rng(8)
        u = rng.normal(size=3) + 1j * rng.normal(size=3)
        for tau in (0.1, 1.1, 2.3):
            a = is_admissible(tau, u)
            b = is_admissible(tau + math.pi, u)
            assert a.admissible == b.admissible
            assert abs(a.margin - b.margin) < 1e-9


class TestSectorBounds:
    def test_worked_example(self):
        fr = sector_bounds([0.0, 1.0], tau=0.0, r=1)
        assert abs(fr.lo - (-1.5 * math.pi)) < 1e-12
        assert abs(fr.hi - (math.pi / 2)) < 1e-12

    def test_opening_exceeds_pi(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            u = rng.normal(size=3) + 1j * rng.normal(size=3)
            adm = is_admissible(0.4, u)
            if not adm:
                continue
            for r in (0, 1, 2):
                fr = sector_bounds(u, 0.4, r)
                assert fr.opening > math.pi

    def test_shift_by_pi(self):
        u = [0.0, 1.0, 0.5 + 1.2j]
        fr1 = sector_bounds(u, 0.2, 1)
        fr2 = sector_bounds(u, 0.2, 2)
        assert abs(fr2.lo - fr1.lo - math.pi) < 1e-9
        assert abs(fr2.hi - fr1.hi - math.pi) < 1e-9

    def test_plain_inside_widened(self):
        uC = [0.0, 0.0, 1.0]
        u = [0.02, -0.02, 1.0]
        plain = sector_bounds(u, 0.3, 1)
        widened = sector_bounds(u, 0.3, 1, widened=True, uC=uC)
        assert widened.lo <= plain.lo + 1e-12
        assert widened.hi >= plain.hi - 1e-12

    def test_widened_degenerate_policy(self):
        fr = sector_bounds([0.01, -0.01], 0.3, 1, widened=True, uC=[0.0, 0.0])
        assert fr.degenerate
        lo_hp, hi_hp = fr.half_plane
        assert abs(fr.lo - (lo_hp - math.pi / 2)) < 1e-12
        assert abs(fr.hi - (hi_hp + math.pi / 2)) < 1e-12

    def test_inadmissible_rejected(self):
        with pytest.raises(AdmissibilityError):
            sector_bounds([0.0, 1.0], math.pi / 2, 1)


class TestClassifyPoint:
    def test_delta_membership(self):
        rep = classify_point([0.0, 0.0, 1.0], tau=1.234)
        assert rep.in_delta
        assert rep.delta_pairs == ((0, 1),)

    def test_crossing_membership(self):
        rep = classify_point([0.0, 1.0], tau=math.pi / 2)
        assert rep.in_crossing and not rep.in_delta

    def test_clean_point(self):
        rep = classify_point([0.0, 1.0], tau=math.pi / 4)
        assert not rep.on_wall

    def test_translation_and_relabel_invariance(self):
        rng = np.random.default_rng(2)
        u = rng.normal(size=3) + 1j * rng.normal(size=3)
        tau = 0.77
        base = classify_point(u, tau)
        shifted = classify_point(u + (0.3 - 0.9j), tau)
        perm = classify_point(u[[2, 0, 1]], tau)
        assert base.in_delta == shifted.in_delta == perm.in_delta
        assert base.in_crossing == shifted.in_crossing == perm.in_crossing
        assert abs(base.min_pair_gap - perm.min_pair_gap) < 1e-12

    def test_epsilon_bound_reported(self):
        rep = classify_point([0.05, -0.05, 1.0], 0.3, uC=[0.0, 0.0, 1.0])
        assert rep.epsilon_bound is not None
        assert abs(rep.epsilon_bound - abs(math.cos(0.3))) < 1e-12


class TestSameCell:
    def test_identical_points(self):
        assert same_cell([0.0, 1.0], [0.0, 1.0], tau=0.4)

    def test_segment_through_delta(self):
        assert not same_cell([0.0, 1.0], [0.0, -1.0], tau=math.pi / 4, samples=2001)

    def test_clean_segment(self):
        assert same_cell([0.0, 1.0], [0.1 + 0.05j, 1.1], tau=0.3)

    def test_endpoint_on_wall_rejected(self):
        with pytest.raises(WallError):
            same_cell([0.0, 0.0], [0.0, 1.0], tau=0.3)


class TestCsvExport:
    def test_rays_csv(self, tmp_path):
        path = tmp_path / "rays.csv"
        rays_to_csv(stokes_ray_directions([0.0, 1.0]), path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["pair_i", "pair_j", "theta"]
        assert len(rows) == 3
        # lossless round-trip of the angle
        assert float(rows[1][2]) in [r.theta for r in stokes_ray_directions([0.0, 1.0]).rays]

    def test_wall_hits_csv(self, tmp_path):
        hits = wall_hits([0.0, 1.0], [0.0, -1.0], tau=0.3, samples=501)
        assert any(kind == "delta" for _, kind in hits)
        path = tmp_path / "hits.csv"
        wall_hits_to_csv(hits, path)
        rows = list(csv.reader(open(path)))
        assert rows[0] == ["sample_t", "wall_type"]
        assert len(rows) == len(hits) + 1
