"""Training loop with validation-based model selection."""

import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from gridseg.config import DEFAULT_FILTERS, DEFAULT_GRANULARITIES
from gridseg.exceptions import ConfigError, InputError, NumericError
from gridseg.nn.constants import BCE_CLAMP, DEFAULT_BLOCKS, DEFAULT_LEARNING_RATE
from gridseg.nn.init import build_model
from gridseg.nn.network import GridsNet
from gridseg.nn.optimizer import TrainState, nadam_step
from gridseg.nn.serialization import save_model
from gridseg.services.dataset_service import (
    ENCODINGS,
    DatasetManifest,
    EncodedSample,
    augment_flip,
    evaluation_batches,
    make_batches,
    merge_manifests,
    prepare_samples,
    stack_batch,
)
from gridseg.utils.io import write_csv
from gridseg.utils.package import CONFIG_SUFFIX, bundled_configs, get_config_path

logger = logging.getLogger(__name__)

LOG_HEADER = ('iteration', 'train_loss', 'val_loss', 'is_best')


@dataclass(frozen=True)
class TrainConfig:
    filters: int = DEFAULT_FILTERS
    blocks: int = DEFAULT_BLOCKS
    granularities: Tuple[int, ...] = DEFAULT_GRANULARITIES
    batch_size: int = 20
    learning_rate: float = DEFAULT_LEARNING_RATE
    max_iterations: int = 5000
    validation_interval: int = 500
    seed: int = 0
    threads: int = 1
    deterministic: bool = False
    encoding: str = 'grid'
    flip: bool = True

    def __post_init__(self):
        if self.filters < 1 or self.blocks < 0:
            raise ConfigError(f"Invalid architecture: filters={self.filters} blocks={self.blocks}")
        if not self.granularities or any(g < 4 for g in self.granularities):
            raise ConfigError(f"Invalid granularities {self.granularities}")
        if self.batch_size < 1 or self.max_iterations < 0 or self.validation_interval < 1:
            raise ConfigError("batch_size and validation_interval must be positive, max_iterations non-negative")
        if not self.learning_rate > 0:
            raise ConfigError(f"Learning rate must be positive, got {self.learning_rate}")
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"Unknown encoding '{self.encoding}', expected one of {ENCODINGS}")

    def with_overrides(self, **overrides) -> 'TrainConfig':
        """Copy with every non-None override applied."""
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def worker_threads(self) -> int:
        return 1 if self.deterministic else self.threads


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ('1', 'true', 'yes', 'on'):
        return True
    if lowered in ('0', 'false', 'no', 'off'):
        return False
    raise ValueError(f"not a boolean: {value!r}")


_FIELD_PARSERS = {
    'filters': int,
    'blocks': int,
    'granularities': lambda v: tuple(int(x) for x in v.split(',') if x.strip()),
    'batch_size': int,
    'learning_rate': float,
    'max_iterations': int,
    'validation_interval': int,
    'seed': int,
    'threads': int,
    'deterministic': _parse_bool,
    'encoding': str,
    'flip': _parse_bool,
}


def parse_train_config(text: str, source: str = '<config>') -> Dict[str, object]:
    """Parse flat `key = value` lines into TrainConfig field values."""
    values: Dict[str, object] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        parser = _FIELD_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"{source}:{lineno}: unknown key '{key}'")
        try:
            values[key] = parser(value)
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {e}") from e
    return values


def resolve_config_path(path_or_name: str) -> Path:
    """A path, or the name of a bundled config (`toy` -> resources/conf/toy-train.conf)."""
    path = Path(path_or_name)
    if path.exists():
        return path
    for candidate in (path_or_name, f'{path_or_name}{CONFIG_SUFFIX}'):
        bundled = Path(get_config_path(candidate))
        if bundled.is_file():
            return bundled
    raise ConfigError(f"Config file not found: {path_or_name} (bundled: {', '.join(bundled_configs())})")


def load_train_config(path_or_name: Optional[str] = None, **overrides) -> TrainConfig:
    """Defaults, then file values, then non-None overrides."""
    values: Dict[str, object] = {}
    if path_or_name:
        path = resolve_config_path(path_or_name)
        values = parse_train_config(path.read_text(encoding='utf-8'), str(path))
    values.update({k: v for k, v in overrides.items() if v is not None})
    unknown = set(values) - set(_FIELD_PARSERS)
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
    return TrainConfig(**values)


@dataclass
class LogRow:
    iteration: int
    train_loss: Optional[float]
    val_loss: float
    is_best: bool

    def as_row(self):
        train = '' if self.train_loss is None else self.train_loss
        return self.iteration, train, self.val_loss, self.is_best


class BestSnapshot:
    """Keeps the parameters with the lowest validation loss seen so far."""

    def __init__(self):
        self.loss = math.inf
        self.iteration: Optional[int] = None
        self.state: Optional[Dict[str, np.ndarray]] = None

    def offer(self, iteration: int, val_loss: float, model: GridsNet) -> bool:
        if val_loss < self.loss:
            self.loss = val_loss
            self.iteration = iteration
            self.state = model.state_dict()
            return True
        return False


@dataclass
class TrainingResult:
    model: GridsNet
    log: List[LogRow] = field(default_factory=list)
    best_iteration: Optional[int] = None
    best_val_loss: float = math.inf
    train_samples: int = 0
    val_samples: int = 0
    skipped_samples: int = 0


def validation_loss(model: GridsNet, samples: Sequence[EncodedSample], batch_size: int) -> float:
    """Mean over samples of the per-sample BCE, eval mode."""
    losses = []
    for batch in evaluation_batches(samples, batch_size):
        x, y = stack_batch(batch)
        pred = model.forward(x, training=False).astype(np.float64)
        p = np.clip(pred, BCE_CLAMP, 1.0 - BCE_CLAMP)
        per_sample = -np.mean(y * np.log(p) + (1.0 - y) * np.log1p(-p), axis=(1, 2, 3))
        losses.extend(per_sample.tolist())
    return float(np.mean(losses))


def _batch_stream(samples: Sequence[EncodedSample], config: TrainConfig, rng: np.random.Generator):
    while True:
        for batch in make_batches(samples, config.batch_size, rng):
            if config.flip:
                batch = [augment_flip(s, rng) for s in batch]
            yield stack_batch(batch)


def write_diagnostics(model: GridsNet, out_dir: Union[str, Path], iteration: int,
                      config: TrainConfig, error: Exception) -> Path:
    """Dump the failing model and the run context next to the training outputs."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_model(model.astype(np.float32), out_dir / f'diverged-{iteration}.gseg')
    report = {
        'iteration': iteration,
        'error': str(error),
        'config': dataclasses.asdict(config),
        'nonfinite_parameters': [n for n, v in model.params.items() if not np.all(np.isfinite(v))],
    }
    path = out_dir / f'diverged-{iteration}.json'
    path.write_text(json.dumps(report, indent=2), encoding='utf-8')
    return path


def train(config: TrainConfig, train_manifests: Union[DatasetManifest, Sequence[DatasetManifest]],
          val_manifest: DatasetManifest, diagnostics_dir: Optional[Union[str, Path]] = None) -> TrainingResult:
    """Train a model and return the snapshot with the best validation loss.

    Validation runs at iteration 0, every `validation_interval` iterations and
    after the last iteration.
    """
    if isinstance(train_manifests, DatasetManifest):
        train_manifests = [train_manifests]
    train_manifest = merge_manifests(list(train_manifests))

    threads = config.worker_threads
    train_set = prepare_samples(train_manifest, config.granularities, threads, config.encoding)
    val_set = prepare_samples(val_manifest, config.granularities, threads, config.encoding)
    if not train_set.samples:
        raise InputError("No usable training samples")
    if not val_set.samples:
        raise InputError("No usable validation samples")

    rng = np.random.default_rng(config.seed)
    model = build_model(config.filters, config.blocks, config.seed)
    state = TrainState(learning_rate=config.learning_rate)
    best = BestSnapshot()
    result = TrainingResult(model, train_samples=train_set.used, val_samples=val_set.used,
                            skipped_samples=train_set.skipped + val_set.skipped)
    logger.info("Training %d-filter model (%d parameters) on %d samples, validating on %d",
                config.filters, model.count_parameters(), train_set.used, val_set.used)

    def validate(iteration: int, train_loss: Optional[float]) -> None:
        val = validation_loss(model, val_set.samples, config.batch_size)
        if not math.isfinite(val):
            raise NumericError(f"Non-finite validation loss at iteration {iteration}")
        is_best = best.offer(iteration, val, model)
        result.log.append(LogRow(iteration, train_loss, val, is_best))
        logger.info("iter %d  train %s  val %.6f%s", iteration,
                    '-' if train_loss is None else f'{train_loss:.6f}', val, '  *' if is_best else '')

    validate(0, None)
    stream = _batch_stream(train_set.samples, config, rng)
    window: List[float] = []
    iteration = 0
    try:
        for iteration in range(1, config.max_iterations + 1):
            x, y = next(stream)
            loss, grads = model.loss_and_gradients(x, y)
            nadam_step(state, model.params, grads)
            window.append(loss)
            if iteration % config.validation_interval == 0 or iteration == config.max_iterations:
                validate(iteration, float(np.mean(window)))
                window = []
    except NumericError as e:
        logger.error("Training diverged at iteration %d: %s", iteration, e)
        if diagnostics_dir is not None:
            path = write_diagnostics(model, diagnostics_dir, iteration, config, e)
            logger.error("Diagnostic snapshot written to %s", path)
        raise

    model.load_state_dict(best.state)
    result.best_iteration = best.iteration
    result.best_val_loss = best.loss
    logger.info("Best validation loss %.6f at iteration %d", best.loss, best.iteration)
    return result


def write_training_log(log: Sequence[LogRow], path: Union[str, Path]) -> None:
    write_csv(Path(path), LOG_HEADER, (row.as_row() for row in log))
