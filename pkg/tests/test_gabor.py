import math

import numpy as np
import pytest

from hopgr import (DataError, GaborParams, Kernel, build_bank, make_kernel,
                   uniform_orientations)
from oracles import kernel_reference


class TestUniformOrientations:
    def test_sixteen_directions_bit_exact(self):
        # 0, pi/16, ..., 15pi/16 computed by the same formula
        assert uniform_orientations(16) == [math.pi * k / 16 for k in range(16)]

    def test_single_direction(self):
        assert uniform_orientations(1) == [0.0]

    def test_four_directions(self):
        assert uniform_orientations(4) == [0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4]

    def test_strictly_increasing_first_zero(self):
        for count in (1, 2, 5, 16, 33):
            angles = uniform_orientations(count)
            assert angles[0] == 0.0
            assert all(b > a for a, b in zip(angles, angles[1:]))
            assert all(0.0 <= a < math.pi for a in angles)

    def test_zero_count_rejected(self):
        with pytest.raises(DataError) as err:
            uniform_orientations(0)
        assert err.value.code == "invalid-parameter"


class TestMakeKernel:
    def test_even_symmetry_exact(self):
        for theta in uniform_orientations(16):
            w = make_kernel(GaborParams(theta)).weights
            assert np.array_equal(w, w[::-1, ::-1])

    def test_zero_dc(self):
        for theta in uniform_orientations(16):
            w = make_kernel(GaborParams(theta)).weights
            assert abs(float(w.sum())) < 1e-9

    def test_rotation_consistency(self):
        k0 = make_kernel(GaborParams(0.0)).weights
        k90 = make_kernel(GaborParams(math.pi / 2)).weights
        assert np.abs(k90 - np.rot90(k0)).max() < 1e-9

    def test_determinism(self):
        p = GaborParams(theta=0.3, f0=0.12, sigma=3.5, half_size=7)
        a = make_kernel(p).weights
        b = make_kernel(p).weights
        assert np.array_equal(a, b)

    def test_center_is_max_before_dc_removal(self):
        # Brute-force the raw (pre-DC) kernel and locate its argmax.
        h = 8
        raw = np.array(kernel_reference(0.0, 0.1, 4.0, h))
        mean = raw.mean()
        raw_pre_dc = raw + mean  # kernel_reference subtracts the mean; undo it
        assert np.unravel_index(raw_pre_dc.argmax(), raw_pre_dc.shape) == (h, h)

    def test_matches_reference_formula(self, rng):
        for _ in range(5):
            theta = float(rng.uniform(0, math.pi))
            f0 = float(rng.uniform(0.05, 0.3))
            sigma = float(rng.uniform(1.5, 6.0))
            half = int(rng.integers(2, 9))
            w = make_kernel(GaborParams(theta, f0, sigma, half)).weights
            ref = np.array(kernel_reference(theta, f0, sigma, half))
            # reference lacks the center-tap fixup; agreement is near machine eps
            assert np.abs(w - ref).max() < 1e-12

    @pytest.mark.parametrize("bad", [
        dict(theta=-0.1), dict(theta=math.pi), dict(theta=4.0),
        dict(theta=0.0, f0=0.0), dict(theta=0.0, f0=-1.0),
        dict(theta=0.0, sigma=0.0), dict(theta=0.0, half_size=0),
    ])
    def test_invalid_params_rejected(self, bad):
        with pytest.raises(DataError) as err:
            make_kernel(GaborParams(**bad))
        assert err.value.code == "invalid-parameter"


class TestKernelType:
    def test_even_side_rejected(self):
        with pytest.raises(DataError):
            Kernel(np.zeros((4, 4)))

    def test_non_square_rejected(self):
        with pytest.raises(DataError):
            Kernel(np.zeros((3, 5)))

    def test_nonzero_dc_rejected(self):
        w = np.full((3, 3), 0.1)
        with pytest.raises(DataError):
            Kernel(w)

    def test_weights_read_only(self):
        k = Kernel(np.zeros((3, 3)))
        with pytest.raises(ValueError):
            k.weights[0, 0] = 1.0


class TestBuildBank:
    def test_uniform_sixteen(self):
        bank = build_bank(uniform_orientations(16), f0=0.1, sigma=4.0, half_size=8)
        assert bank.count == 16
        assert bank.mode == "uniform"
        assert all(k.side == 17 for k in bank.kernels)

    def test_selected_eight_directions(self):
        # the eight dominant-direction indices {0,1,2,3,8,13,14,15} over O=16
        thetas = [math.pi * k / 16 for k in (0, 1, 2, 3, 8, 13, 14, 15)]
        bank = build_bank(thetas)
        assert bank.count == 8
        assert bank.mode == "physiological"

    def test_all_selected_degenerates_to_uniform(self):
        thetas = [math.pi * k / 8 for k in range(8)]
        assert build_bank(thetas).mode == "uniform"

    def test_empty_rejected(self):
        with pytest.raises(DataError) as err:
            build_bank([])
        assert err.value.code == "invalid-parameter"

    def test_duplicates_rejected(self):
        with pytest.raises(DataError):
            build_bank([0.0, 0.5, 0.5, 1.0])

    def test_out_of_range_rejected(self):
        with pytest.raises(DataError):
            build_bank([0.0, math.pi])

    def test_unsorted_rejected(self):
        with pytest.raises(DataError):
            build_bank([0.5, 0.2])
