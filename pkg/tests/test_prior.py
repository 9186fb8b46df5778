import math

import numpy as np
import pytest

from hopgr import (BankParams, DataError, GrayImage, HcrHistogram,
                   accumulate_hcr, build_bank, competitive_response,
                   load_prior, per_image_hcr, save_prior, select_directions,
                   uniform_orientations, uniform_prior)
from hopgr.prior import parse_prior, format_prior
from conftest import make_line_image
from oracles import hcr_reference

# Published per-direction sums (value at bin k, theta = pi*k/16), used as a
# frozen fixture for the selection logic.
REPORTED_SUMS_BY_K = {
    0: -80.41, 1: -29.76, 2: -10.20, 3: -4.48, 4: -2.12, 5: -1.14,
    6: -1.00, 7: -1.87, 8: -7.171, 9: -1.72, 10: -0.90, 11: -1.03,
    12: -2.14, 13: -4.57, 14: -10.62, 15: -30.63,
}


def small_bank(count=4, half=2):
    return build_bank(uniform_orientations(count), f0=0.12, sigma=1.8, half_size=half)


def hcr_from_sums(sums_by_k, image_count=10, pixel_count=1000):
    o = len(sums_by_k)
    return HcrHistogram(
        bin_thetas=tuple(math.pi * k / o for k in range(o)),
        sums=tuple(sums_by_k[k] for k in range(o)),
        image_count=image_count, pixel_count=pixel_count,
        bank=BankParams(), dataset_id="fixture")


class TestAccumulateHcr:
    def test_constant_corpus_all_bins_tie_at_zero(self):
        bank = small_bank()
        corpus = [GrayImage(np.full((10, 10), 0.5)) for _ in range(3)]
        hcr = accumulate_hcr(corpus, bank)
        assert hcr.sums == (0.0, 0.0, 0.0, 0.0)
        assert hcr.image_count == 3
        assert hcr.pixel_count == 300

    def test_horizontal_corpus_makes_bin_zero_the_minimum(self, rng):
        bank = build_bank(uniform_orientations(16), half_size=5)
        corpus = [make_line_image(0.0, height=40, width=80,
                                  row=float(rng.uniform(10, 30)))
                  for _ in range(4)]
        hcr = accumulate_hcr(corpus, bank, dataset_id="horizontal")
        assert int(np.argmin(hcr.sums)) == 0
        assert hcr.sums[0] < 0

    def test_exact_triple_loop_over_library_fields(self, rng):
        # brute-force Eq-style accumulation over the library's own response
        # fields agrees bit for bit
        bank = small_bank()
        corpus = [GrayImage(rng.random((6, 7))) for _ in range(5)]
        hcr = accumulate_hcr(corpus, bank)
        sums = [0.0, 0.0, 0.0, 0.0]
        for img in corpus:
            field = competitive_response(img, bank)
            local = [0.0, 0.0, 0.0, 0.0]
            for r in range(img.height):
                for c in range(img.width):
                    local[int(field.theta_idx[r, c])] += float(field.m[r, c])
            for o in range(4):
                sums[o] += local[o]
        assert hcr.sums == tuple(sums)

    def test_matches_independent_bruteforce(self, rng):
        bank = small_bank()
        corpus = [GrayImage(rng.random((6, 6))) for _ in range(3)]
        hcr = accumulate_hcr(corpus, bank)
        ref = hcr_reference([img.pixels.tolist() for img in corpus],
                            [k.weights.tolist() for k in bank.kernels])
        assert np.abs(np.array(hcr.sums) - np.array(ref)).max() < 1e-9

    def test_removing_last_image_subtracts_its_contribution(self, rng):
        bank = small_bank()
        corpus = [GrayImage(rng.random((8, 8))) for _ in range(4)]
        full = accumulate_hcr(corpus, bank)
        without = accumulate_hcr(corpus[:-1], bank)
        last = per_image_hcr(corpus[-1], bank)
        rebuilt = np.array(without.sums) + last
        assert np.array_equal(np.array(full.sums), rebuilt)

    def test_empty_corpus_rejected(self):
        with pytest.raises(DataError) as err:
            accumulate_hcr([], small_bank())
        assert err.value.code == "empty-corpus"

    def test_non_uniform_bank_rejected(self, rng):
        bank = build_bank([0.0, 0.3, 1.0], half_size=2)
        assert bank.mode == "physiological"
        with pytest.raises(DataError) as err:
            accumulate_hcr([GrayImage(rng.random((8, 8)))], bank)
        assert err.value.code == "invalid-parameter"


class TestSelectDirections:
    def test_reported_sums_select_the_eight_dominant_bins(self):
        hcr = hcr_from_sums(REPORTED_SUMS_BY_K)
        prior = select_directions(hcr, 8)
        assert prior.selected_k == (0, 1, 2, 3, 8, 13, 14, 15)
        expected = tuple(math.pi * k / 16 for k in (0, 1, 2, 3, 8, 13, 14, 15))
        assert prior.selected_thetas == expected
        # ascending order of the sums starts with bins 0, 15, 1
        order = sorted(range(16), key=lambda k: hcr.sums[k])
        assert order[:3] == [0, 15, 1]
        # horizontal direction dominates the weakest bin by > 89x
        assert abs(hcr.sums[0]) / abs(hcr.sums[10]) > 89

    def test_count_equal_to_o_selects_everything(self):
        hcr = hcr_from_sums(REPORTED_SUMS_BY_K)
        prior = select_directions(hcr, 16)
        assert prior.selected_k == tuple(range(16))

    def test_ties_break_by_smaller_angle(self):
        sums = {k: 0.0 for k in range(8)}
        hcr = hcr_from_sums(sums)
        prior = select_directions(hcr, 3)
        assert prior.selected_k == (0, 1, 2)

    def test_selection_depends_only_on_sums_and_count(self, rng):
        for _ in range(20):
            o = int(rng.integers(2, 12))
            sums = {k: float(rng.normal()) for k in range(o)}
            count = int(rng.integers(1, o + 1))
            prior = select_directions(hcr_from_sums(sums), count)
            expected = tuple(sorted(sorted(range(o), key=lambda k: (sums[k], k))[:count]))
            assert prior.selected_k == expected

    @pytest.mark.parametrize("count", [0, 17, -1])
    def test_invalid_count(self, count):
        with pytest.raises(DataError) as err:
            select_directions(hcr_from_sums(REPORTED_SUMS_BY_K), count)
        assert err.value.code == "invalid-count"


class TestPriorFile:
    def test_round_trip_identity(self, rng, tmp_path):
        bank = small_bank(count=6, half=3)
        corpus = [GrayImage(rng.random((9, 12))) for _ in range(3)]
        prior = select_directions(accumulate_hcr(corpus, bank, dataset_id="rt"), 3)
        path = tmp_path / "prior.txt"
        save_prior(prior, path)
        loaded = load_prior(path)
        assert loaded == prior
        assert loaded.fingerprint() == prior.fingerprint()

    def test_round_trip_of_uniform_prior(self, tmp_path):
        prior = uniform_prior(16, BankParams())
        path = tmp_path / "prior.txt"
        save_prior(prior, path)
        assert load_prior(path) == prior

    def test_hand_written_selected_directions(self, tmp_path):
        text = "\n".join(
            ["version=1", "O=16", "O_s=8", "S=3132", "f0=0.1", "sigma=4.0",
             "half_size=8", "dataset_id=training", "pixel_count=150649560"]
            + [f"{k} {REPORTED_SUMS_BY_K[k]}" for k in range(16)]
            + ["selected: 0,1,2,3,8,13,14,15"]) + "\n"
        path = tmp_path / "prior.txt"
        path.write_text(text, encoding="utf-8")
        prior = load_prior(path)
        assert prior.selected_k == (0, 1, 2, 3, 8, 13, 14, 15)
        assert prior.selected_thetas == tuple(math.pi * k / 16
                                              for k in (0, 1, 2, 3, 8, 13, 14, 15))
        assert prior.source.image_count == 3132

    def test_selected_count_exceeding_o_rejected(self):
        text = "\n".join(
            ["version=1", "O=4", "O_s=5", "S=1", "f0=0.1", "sigma=4.0",
             "half_size=8", "dataset_id=x", "pixel_count=10",
             "0 -1.0", "1 -2.0", "2 -3.0", "3 -4.0", "selected: 0,1,2,3"]) + "\n"
        with pytest.raises(DataError) as err:
            parse_prior(text)
        assert err.value.code == "malformed-file"

    @pytest.mark.parametrize("mutate", [
        lambda t: t.replace("version=1", "version=9"),
        lambda t: t.replace("f0=", "frequency="),
        lambda t: t.replace("0 ", "junk ", 1),
        lambda t: "\n".join(t.splitlines()[:-2]) + "\n",  # drop a sum + selected
        lambda t: t.replace("selected: 0,1,2", "selected: 0,1,banana"),
        lambda t: t.replace("selected: 0,1,2", "selected: 2,1,0"),
    ])
    def test_malformed_files_are_diagnosed(self, mutate):
        good = format_prior(uniform_prior(6, BankParams(), dataset_id="x"))
        # uniform_prior(6) selects all six; trim selection to three for mutations
        good = good.replace("O_s=6", "O_s=3").replace("selected: 0,1,2,3,4,5",
                                                      "selected: 0,1,2")
        assert parse_prior(good).selected_k == (0, 1, 2)
        with pytest.raises(DataError) as err:
            parse_prior(mutate(good))
        assert err.value.code == "malformed-file"

    def test_missing_file_is_io_error(self, tmp_path):
        from hopgr import StorageError
        with pytest.raises(StorageError) as err:
            load_prior(tmp_path / "absent.txt")
        assert err.value.code == "io-error"


class TestUniformPrior:
    def test_selects_every_direction(self):
        prior = uniform_prior(16, BankParams())
        assert prior.selected_k == tuple(range(16))
        assert prior.selected_thetas == tuple(uniform_orientations(16))
        assert prior.source.o == prior.source.o_s == 16
