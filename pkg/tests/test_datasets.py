import numpy as np
import pytest

from qcnn.datasets import (
    ContaminationPattern,
    DatasetError,
    TestSetSpec,
    TrainingSetSpec,
    TupleBatch,
    build_test_set,
    build_training_set,
    enumerate_patterns,
    generate_block,
    generate_tuple,
    iter_training_chunks,
    label_tuple,
    mask_bits,
    mask_positions,
    read_binary,
    read_csv,
    write_binary,
    write_csv,
)
from qcnn.numerics import RngState, RngStream


def test_enumerate_patterns():
    assert enumerate_patterns(3, 2) == [(1, 2), (1, 3), (2, 3)]
    assert len(enumerate_patterns(4, 2)) == 6
    assert enumerate_patterns(2, 0) == [()]
    with pytest.raises(DatasetError):
        enumerate_patterns(5, 1)
    with pytest.raises(DatasetError):
        enumerate_patterns(2, 3)


def test_mask_round_trip():
    for n in range(1, 5):
        for k in range(n + 1):
            for pos in enumerate_patterns(n, k):
                assert mask_positions(mask_bits(pos), n) == pos


def test_labels():
    assert label_tuple(ContaminationPattern(3)) is False
    assert label_tuple(ContaminationPattern(3, (1, 2), 2.67, 1.0)) is True
    assert label_tuple(ContaminationPattern(2, (1,), 0.0, 1.1)) is True


def test_pattern_validation():
    with pytest.raises(DatasetError):
        ContaminationPattern(2, (3,), 1.0)
    with pytest.raises(DatasetError):
        ContaminationPattern(2, (1, 1), 1.0)
    with pytest.raises(DatasetError):
        ContaminationPattern(2, (), 1.0)
    with pytest.raises(DatasetError):
        ContaminationPattern(2, (1,), 0.0, 1.0)


def test_generate_tuple_deterministic():
    pat = ContaminationPattern(3, (2,), 6.0)
    a = generate_tuple(pat, RngState(4))
    b = generate_tuple(pat, RngState(4))
    assert a == b and a.label and len(a.values) == 3


def test_in_control_moments():
    batch = generate_block(2, (), 1_000_000, 0.0, 1.0, RngStream(1))
    assert np.all(np.abs(batch.values.mean(axis=0)) < 0.004)
    assert not batch.label.any()


def test_scale_shift_sd():
    batch = generate_block(3, (1, 2, 3), 100_000, 0.0, 3.33, RngStream(2))
    assert np.all(np.abs(batch.values.std(axis=0) - 3.33) < 0.05)


def test_placement():
    batch = generate_block(3, (2,), 100_000, 6.0, 1.0, RngStream(3))
    means = batch.values.mean(axis=0)
    assert abs(means[1] - 6.0) < 0.02
    assert abs(means[0]) < 0.02 and abs(means[2]) < 0.02
    assert set(batch.mask.tolist()) == {2}


@pytest.mark.parametrize("a,n,unit,expected", [
    (1, 1, 100_000, (100_000, 100_000, 100_000)),
    (16, 4, 100_000, (16 * 8 * 100_000, 800_000, 800_000)),
    (2, 2, 100, (400, 200, 200)),
])
def test_training_composition(a, n, unit, expected):
    comp = TrainingSetSpec(a, n, unit).composition()
    assert (comp["in_control"], comp["scale_shift"], comp["location_shift"]) == expected
    assert comp["total"] == sum(expected)
    assert sum(comp["scale_shift_cells"].values()) == expected[1]
    assert len(comp["scale_shift_cells"]) == 2**n - 1
    counts = list(comp["scale_shift_cells"].values())
    assert max(counts) - min(counts) <= 1


def test_training_set_contents():
    spec = TrainingSetSpec(2, 2, unit=500)
    data = build_training_set(spec, RngState(9))
    assert len(data) == spec.total == 4000
    assert int((~data.label).sum()) == 2000
    shifted = data.take(data.label)
    scale = shifted.take(shifted.mu == 0.0)
    loc = shifted.take(shifted.mu != 0.0)
    assert len(scale) == 1000 and len(loc) == 1000
    assert scale.sigma.min() > 1.0 and scale.sigma.max() <= 11.0
    assert np.all(loc.sigma == 1.0)
    assert np.abs(loc.mu).min() > 0.0 and np.abs(loc.mu).max() <= 10.0
    assert (loc.mu > 0).any() and (loc.mu < 0).any()
    again = build_training_set(spec, RngState(9))
    np.testing.assert_array_equal(data.values, again.values)


def test_training_set_limit():
    with pytest.raises(OverflowError):
        build_training_set(TrainingSetSpec(16, 4, 100_000), RngState(0), max_records=1000)


def test_training_chunks_stream():
    spec = TrainingSetSpec(1, 3, unit=100)
    total = sum(len(c) for c in iter_training_chunks(spec, RngStream(0)))
    assert total == spec.total


def test_training_spec_validation():
    for kwargs in ({"a": 5, "n": 2}, {"a": 1, "n": 5}, {"a": 1, "n": 2, "unit": 0}):
        with pytest.raises(DatasetError):
            TrainingSetSpec(**kwargs)


def test_test_set_sizes():
    assert TestSetSpec(3, 2, 1.0).total == 300_000
    assert TestSetSpec(4, 4, 1.0).total == 100_000
    assert TestSetSpec(2, 0, in_control_count=800_000).total == 800_000
    small = build_test_set(TestSetSpec(3, 2, 1.0, replicates_per_pattern=10), RngState(0))
    assert len(small) == 30
    assert sorted(set(small.mask.tolist())) == [3, 5, 6]
    with pytest.raises(DatasetError):
        TestSetSpec(2, 0, mu=1.0)
    with pytest.raises(DatasetError):
        TestSetSpec(2, 1)


def test_csv_round_trip(tmp_path):
    batch = build_training_set(TrainingSetSpec(1, 3, unit=20), RngState(1))
    path = tmp_path / "d.csv"
    assert write_csv(batch, path) == len(batch)
    back = read_csv(path)
    np.testing.assert_array_equal(back.values, batch.values)
    np.testing.assert_array_equal(back.mask, batch.mask)
    np.testing.assert_array_equal(back.mu, batch.mu)
    header = path.read_text().splitlines()[0]
    assert header == "n,k,mask,mu,sigma,label,x1,x2,x3,x4"


def test_binary_round_trip(tmp_path):
    batch = build_training_set(TrainingSetSpec(1, 2, unit=20), RngState(1))
    path = tmp_path / "d.qcds"
    write_binary(batch, path, 2)
    back = read_binary(path)
    for f in ("values", "k", "mask", "mu", "sigma"):
        np.testing.assert_array_equal(getattr(back, f), getattr(batch, f))
    data = path.read_bytes()
    path.write_bytes(data[:-3])
    with pytest.raises(DatasetError):
        read_binary(path)


def test_records_view():
    batch = generate_block(2, (1,), 3, 2.0, 1.0, RngStream(0))
    recs = list(batch.records())
    assert len(recs) == 3 and all(r.label for r in recs)
    assert recs[0].pattern.positions == (1,)
    with pytest.raises(DatasetError):
        TupleBatch.concat([])
