import numpy as np
import pytest

from lumicell.artifacts import (
    read_fingerprints,
    read_json,
    read_waveform_csv,
    write_cdf,
    write_decoded_csv,
    write_fingerprints,
    write_json,
    write_maps,
    write_rows,
    write_waveform_csv,
)
from lumicell.gpr.maps import IntensityMapSet
from lumicell.gpr.model import FingerprintSet
from lumicell.models import GPHyperparams, GridSpec
from lumicell.phy.demodulator import DecodedFrame
from lumicell.phy.frame import BeaconFrame
from lumicell.phy.waveform import Waveform


def test_waveform_csv_with_sections(tmp_path):
    w = Waveform(samples=np.array([0.0, 0.5, -1.25, 1.0]), sample_rate=48_000.0, start_sample=10)
    path = write_waveform_csv(w, tmp_path / "w.csv", ["preamble", "preamble", "payload", "checksum"])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "# sample_rate=48000"
    assert lines[1] == "sample,amplitude,section"
    assert lines[2] == "10,0.000000,preamble"
    loaded = read_waveform_csv(path)
    assert loaded.sample_rate == 48_000.0
    assert loaded.start_sample == 10
    np.testing.assert_allclose(loaded.samples, w.samples)


def test_waveform_sections_must_label_every_sample(tmp_path):
    w = Waveform(samples=np.zeros(3), sample_rate=1000.0)
    with pytest.raises(ValueError):
        write_waveform_csv(w, tmp_path / "w.csv", ["idle"])


def test_single_column_waveform(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("# sample_rate=1.2e+06\n0.1\n0.2\n-0.3\n", encoding="utf-8")
    loaded = read_waveform_csv(path)
    assert loaded.sample_rate == 1.2e6
    assert loaded.start_sample == 0
    np.testing.assert_allclose(loaded.samples, [0.1, 0.2, -0.3])


def test_waveform_without_header_is_rejected(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("0.1\n0.2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="sample_rate"):
        read_waveform_csv(path)


def test_rows_use_fixed_float_format(tmp_path):
    path = write_rows([(1, 0.1234567, True)], ["step", "error", "clean"], tmp_path / "rows.csv")
    assert path.read_text(encoding="utf-8") == "step,error,clean\n1,0.123457,True\n"


def test_cdf_columns(tmp_path):
    path = write_cdf([(0, 0.0), (100, 0.25)], tmp_path / "cdf.csv")
    assert path.read_text(encoding="utf-8").splitlines() == ["percentile,error_m", "0,0.000000", "100,0.250000"]


def test_decoded_csv(tmp_path):
    decoded = [DecodedFrame(frame=BeaconFrame.for_payload(0x00AB), rss=0.5, start_sample=120, clean=True)]
    path = write_decoded_csv(decoded, tmp_path / "decoded.csv")
    assert path.read_text(encoding="utf-8").splitlines()[1] == "120,0x00AB,0.500000,True"


def test_fingerprints_file(tmp_path):
    fp = FingerprintSet(
        positions=np.array([[0.5, 0.5], [0.9, 0.5]]),
        observations={2: np.array([0.25, 0.5]), 1: np.array([1.0, 0.75])},
    )
    path = write_fingerprints(fp, tmp_path / "fingerprints.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,y,beacon_id,rss"
    assert lines[1:3] == ["0.500000,0.500000,1,1.000000", "0.500000,0.500000,2,0.250000"]
    assert len(lines) == 1 + 4
    loaded = read_fingerprints(path)
    assert loaded.beacon_ids == [1, 2]
    np.testing.assert_allclose(loaded.positions, fp.positions)
    np.testing.assert_allclose(loaded.observations[2], [0.25, 0.5])


def test_maps_directory(tmp_path):
    grid = GridSpec.from_extent(0.0, 0.0, 0.2, 0.1, 0.1)
    ones = np.ones(grid.shape)
    maps = IntensityMapSet(
        grid=grid,
        mean={3: ones * 0.5},
        variance={3: ones * 0.02},
        latent_variance={3: ones * 0.01},
        hp=GPHyperparams(sigma_f2=1.0, length_scale=1.0, sigma_n2=0.01),
    )
    written = write_maps(maps, tmp_path / "maps")
    assert [p.name for p in written] == ["beacon_3.csv"]
    lines = written[0].read_text(encoding="utf-8").splitlines()
    assert lines[0] == "x,y,mean,variance,latent_variance"
    assert len(lines) == 1 + 6
    assert lines[2] == "0.100000,0.000000,0.500000,0.020000,0.010000"


def test_json_is_sorted_and_readable(tmp_path):
    path = write_json({"b": 1, "a": [0.5, None]}, tmp_path / "summary.json")
    text = path.read_text(encoding="utf-8")
    assert text.index('"a"') < text.index('"b"')
    assert read_json(path) == {"a": [0.5, None], "b": 1}


def test_fingerprints_with_missing_value_are_rejected(tmp_path):
    path = tmp_path / "fingerprints.csv"
    path.write_text("x,y,beacon_id,rss\n0.5,0.5,1,1.0\n0.5,0.5,2,0.2\n0.9,0.5,1,0.8\n", encoding="utf-8")
    with pytest.raises(ValueError, match="every beacon"):
        read_fingerprints(path)
