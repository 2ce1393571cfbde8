import numpy as np
import pytest

from gridseg.exceptions import ManifestError
from gridseg.services.dataset_service import (
    DatasetManifest,
    EncodedSample,
    augment_flip,
    bucket_by_shape,
    check_disjoint,
    evaluation_batches,
    flip_sample,
    make_batches,
    merge_manifests,
    prepare_samples,
    read_manifest,
    stack_batch,
)
from gridseg.services.encoding_service import GridTensor


def make_sample(i, rows=4, cols=5):
    x = np.zeros((rows, cols, 3))
    x[:, 0] = 1.0
    x[0, 0, 0] = i / 1000
    return EncodedSample(GridTensor(x), GridTensor(np.zeros((rows, cols, 1))), 24, f's{i}')


class TestManifest:
    def test_read(self, tiny_dataset):
        manifest = read_manifest(tiny_dataset, 'validation')
        assert len(manifest) == 3
        assert manifest.role == 'validation'
        image, mask = manifest.pairs[0]
        assert image == tiny_dataset.parent / 'img0.png'
        assert mask.exists()

    def test_comments_and_blank_lines(self, tiny_dataset):
        text = tiny_dataset.read_text()
        tiny_dataset.write_text('# header\n\n' + text)
        assert len(read_manifest(tiny_dataset)) == 3

    def test_missing_file(self, temp_dir):
        path = temp_dir / 'm.txt'
        path.write_text('nope.png\tnope_mask.png\n')
        with pytest.raises(ManifestError, match='not found'):
            read_manifest(path)

    def test_malformed_line(self, tiny_dataset):
        tiny_dataset.write_text('img0.png mask0.png\n')
        with pytest.raises(ManifestError):
            read_manifest(tiny_dataset)

    def test_empty(self, temp_dir):
        (temp_dir / 'm.txt').write_text('# nothing\n')
        with pytest.raises(ManifestError):
            read_manifest(temp_dir / 'm.txt')

    def test_unknown_role(self, tiny_dataset):
        with pytest.raises(ManifestError):
            read_manifest(tiny_dataset, 'holdout')

    def test_disjoint(self, tiny_dataset):
        train = read_manifest(tiny_dataset, 'train')
        test = read_manifest(tiny_dataset, 'test')
        check_disjoint(train)
        with pytest.raises(ManifestError, match='both'):
            check_disjoint(train, test)

    def test_merge(self, tiny_dataset):
        merged = merge_manifests([read_manifest(tiny_dataset), read_manifest(tiny_dataset)])
        assert len(merged) == 6


class TestPrepare:
    def test_counts(self, tiny_dataset):
        prepared = prepare_samples(read_manifest(tiny_dataset), (24, 48))
        assert prepared.attempted == 6
        assert prepared.used == 6 and prepared.skipped == 0
        assert [s.granularity for s in prepared.samples[:2]] == [24, 48]
        assert prepared.samples[0].source_id == 'img0'
        assert prepared.samples[0].grid_shape == (4, 6)

    def test_too_fine_granularity_is_skipped(self, tiny_dataset):
        prepared = prepare_samples(read_manifest(tiny_dataset), (24, 5000))
        assert prepared.used == 3 and prepared.skipped == 3

    def test_threads_keep_order(self, tiny_dataset):
        manifest = read_manifest(tiny_dataset)
        a = prepare_samples(manifest, (24,), threads=1)
        b = prepare_samples(manifest, (24,), threads=3)
        assert [s.source_id for s in a.samples] == [s.source_id for s in b.samples]
        assert all(x.input.same_as(y.input) for x, y in zip(a.samples, b.samples))

    def test_bicubic_encoding(self, tiny_dataset):
        prepared = prepare_samples(read_manifest(tiny_dataset), (48,), encoding='bicubic')
        assert prepared.samples[0].grid_shape == (6, 8)

    def test_unknown_encoding(self, tiny_dataset):
        with pytest.raises(ManifestError):
            prepare_samples(read_manifest(tiny_dataset), (24,), encoding='slic')


class TestFlip:
    def test_involution(self):
        sample = make_sample(3)
        twice = flip_sample(flip_sample(sample))
        assert twice.input.same_as(sample.input)
        assert twice.label.same_as(sample.label)

    def test_mirrors_columns(self):
        flipped = flip_sample(make_sample(3))
        assert np.all(flipped.input.data[:, -1, 1] == 1.0)
        assert not flipped.input.data[:, 0].any()

    def test_rate(self):
        rng = np.random.default_rng(0)
        sample = make_sample(1)
        flips = sum(augment_flip(sample, rng) is not sample for _ in range(10000))
        assert 0.47 <= flips / 10000 <= 0.53


class TestBatches:
    def test_sizes(self):
        samples = [make_sample(i) for i in range(50)]
        batches = make_batches(samples, 20, np.random.default_rng(0))
        assert [len(b) for b in batches] == [20, 20, 10]
        assert sorted(s.source_id for b in batches for s in b) == sorted(s.source_id for s in samples)

    def test_single_shape_per_batch(self):
        samples = [make_sample(i, rows=4 + i % 3) for i in range(30)]
        for batch in make_batches(samples, 4, np.random.default_rng(1)):
            assert len({s.grid_shape for s in batch}) == 1
            x, y = stack_batch(batch)
            assert x.shape[0] == y.shape[0] == len(batch)

    def test_deterministic(self):
        samples = [make_sample(i, rows=4 + i % 2) for i in range(20)]
        a = make_batches(samples, 3, np.random.default_rng(5))
        b = make_batches(samples, 3, np.random.default_rng(5))
        assert [[s.source_id for s in batch] for batch in a] == [[s.source_id for s in batch] for batch in b]

    def test_bucket_keys_sorted(self):
        samples = [make_sample(0, rows=6), make_sample(1, rows=4), make_sample(2, rows=6)]
        assert list(bucket_by_shape(samples)) == [(4, 5), (6, 5)]

    def test_evaluation_batches_unshuffled(self):
        samples = [make_sample(i) for i in range(5)]
        batches = evaluation_batches(samples, 2)
        assert [[s.source_id for s in b] for b in batches] == [['s0', 's1'], ['s2', 's3'], ['s4']]

    def test_empty(self):
        with pytest.raises(ManifestError):
            make_batches([], 4, np.random.default_rng(0))


def test_manifest_iterates_pairs(tiny_dataset):
    manifest = read_manifest(tiny_dataset)
    assert isinstance(manifest, DatasetManifest)
    assert list(manifest) == manifest.pairs
