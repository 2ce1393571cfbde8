"""Dataset manifests, encoded training samples, augmentation and batching."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from gridseg.exceptions import GridSegError, ManifestError
from gridseg.grid.gridizer import gridize
from gridseg.imaging.io import load_image, load_mask
from gridseg.imaging.raster import require_same_shape
from gridseg.services.baseline_service import encode_baseline_pair
from gridseg.services.encoding_service import GridTensor, encode_pair
from gridseg.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

ROLES = ('train', 'validation', 'test')
ENCODINGS = ('grid', 'bicubic')


@dataclass
class DatasetManifest:
    pairs: List[Tuple[Path, Path]]
    role: str = 'train'
    source: str = ''

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def read_manifest(path: Union[str, Path], role: str = 'train') -> DatasetManifest:
    """Read `image<TAB>mask` lines; relative paths resolve against the manifest's directory."""
    path = Path(path)
    if role not in ROLES:
        raise ManifestError(f"Unknown manifest role '{role}'")
    try:
        lines = path.read_text(encoding='utf-8').splitlines()
    except OSError as e:
        raise ManifestError(f"Cannot read manifest {path}: {e}") from e

    pairs = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith('#'):
            continue
        fields = line.split('\t')
        if len(fields) != 2:
            raise ManifestError(f"{path}:{lineno}: expected 'image<TAB>mask', got {line!r}")
        image, mask = (path.parent / f.strip() for f in fields)
        for p in (image, mask):
            if not p.exists():
                raise ManifestError(f"{path}:{lineno}: file not found: {p}")
        pairs.append((image, mask))
    if not pairs:
        raise ManifestError(f"Manifest {path} lists no image pairs")
    return DatasetManifest(pairs, role, str(path))


def merge_manifests(manifests: Sequence[DatasetManifest]) -> DatasetManifest:
    if not manifests:
        raise ManifestError("No manifests given")
    pairs = [pair for m in manifests for pair in m.pairs]
    return DatasetManifest(pairs, manifests[0].role, ','.join(m.source for m in manifests))


def write_manifest(pairs: Iterable[Tuple[str, str]], path: Union[str, Path]) -> None:
    with open(path, 'w', encoding='utf-8') as f:
        for image, mask in pairs:
            f.write(f'{image}\t{mask}\n')


def check_disjoint(*manifests: DatasetManifest) -> None:
    """Reject any image pair that appears under more than one role."""
    seen: Dict[Tuple[Path, Path], str] = {}
    for manifest in manifests:
        for image, mask in manifest.pairs:
            key = (image.resolve(), mask.resolve())
            other = seen.get(key)
            if other is not None and other != manifest.role:
                raise ManifestError(f"{image} appears in both the {other} and {manifest.role} sets")
            seen[key] = manifest.role


@dataclass(frozen=True, eq=False)
class EncodedSample:
    input: GridTensor
    label: GridTensor
    granularity: int
    source_id: str

    @property
    def grid_shape(self) -> Tuple[int, int]:
        return self.input.rows, self.input.cols


@dataclass
class PreparedSamples:
    samples: List[EncodedSample] = field(default_factory=list)
    attempted: int = 0
    skipped: int = 0

    @property
    def used(self) -> int:
        return len(self.samples)


def _encode_image_pair(image_path: Path, mask_path: Path, granularities: Sequence[int], encoding: str):
    """Encode one pair at every granularity; returns (samples, skipped)."""
    source_id = image_path.stem
    try:
        image = load_image(image_path)
        mask = load_mask(mask_path)
        require_same_shape(image.shape, mask.shape, f"{image_path.name} and {mask_path.name}")
    except GridSegError as e:
        logger.warning("Skipping %s: %s", image_path, e)
        return [], len(granularities)

    samples, skipped = [], 0
    for n in granularities:
        try:
            if encoding == 'bicubic':
                x, y = encode_baseline_pair(image, mask, n)
            else:
                x, y = encode_pair(image, mask, gridize(image, n))
        except GridSegError as e:
            logger.warning("Skipping %s at %d superpixels: %s", image_path, n, e)
            skipped += 1
            continue
        samples.append(EncodedSample(x, y, n, source_id))
    return samples, skipped


def prepare_samples(manifest: DatasetManifest, granularities: Sequence[int],
                    threads: int = 1, encoding: str = 'grid') -> PreparedSamples:
    """Gridize and encode every pair at every granularity, in manifest order."""
    if encoding not in ENCODINGS:
        raise ManifestError(f"Unknown encoding '{encoding}', expected one of {ENCODINGS}")
    results = ordered_map(
        lambda pair: _encode_image_pair(pair[0], pair[1], granularities, encoding),
        manifest.pairs, threads,
    )
    prepared = PreparedSamples(attempted=len(manifest) * len(granularities))
    for samples, skipped in results:
        prepared.samples.extend(samples)
        prepared.skipped += skipped
    logger.info("Prepared %d %s samples from %d images (%d skipped)",
                prepared.used, manifest.role, len(manifest), prepared.skipped)
    return prepared


def flip_sample(sample: EncodedSample) -> EncodedSample:
    """Mirror input and label along the column axis."""
    return EncodedSample(sample.input.flipped(), sample.label.flipped(), sample.granularity, sample.source_id)


def augment_flip(sample: EncodedSample, rng: np.random.Generator) -> EncodedSample:
    """Flip input and label together with probability 0.5."""
    return flip_sample(sample) if rng.random() < 0.5 else sample


def bucket_by_shape(samples: Sequence[EncodedSample]) -> Dict[Tuple[int, int], List[int]]:
    """Sample indices grouped by grid shape; keys sorted for a stable order."""
    buckets: Dict[Tuple[int, int], List[int]] = {}
    for i, sample in enumerate(samples):
        buckets.setdefault(sample.grid_shape, []).append(i)
    return {key: buckets[key] for key in sorted(buckets)}


def make_batches(samples: Sequence[EncodedSample], batch_size: int,
                 rng: np.random.Generator) -> List[List[EncodedSample]]:
    """One epoch of single-shape batches.

    Buckets are visited in a shuffled order; within a bucket samples are
    shuffled and cut into batches of at most `batch_size`.
    """
    if not samples:
        raise ManifestError("Cannot batch an empty sample set")
    if batch_size < 1:
        raise ManifestError(f"Batch size must be positive, got {batch_size}")
    buckets = list(bucket_by_shape(samples).values())
    batches = []
    for b in rng.permutation(len(buckets)):
        indices = buckets[b]
        order = [indices[i] for i in rng.permutation(len(indices))]
        for start in range(0, len(order), batch_size):
            batches.append([samples[i] for i in order[start:start + batch_size]])
    return batches


def stack_batch(batch: Sequence[EncodedSample]) -> Tuple[np.ndarray, np.ndarray]:
    """(N, R, C, K) inputs and (N, R, C, 1) labels."""
    x = np.stack([s.input.data for s in batch])
    y = np.stack([s.label.data for s in batch])
    return x, y


def evaluation_batches(samples: Sequence[EncodedSample], batch_size: int) -> List[List[EncodedSample]]:
    """Unshuffled single-shape batches."""
    batches = []
    for indices in bucket_by_shape(samples).values():
        for start in range(0, len(indices), batch_size):
            batches.append([samples[i] for i in indices[start:start + batch_size]])
    return batches
