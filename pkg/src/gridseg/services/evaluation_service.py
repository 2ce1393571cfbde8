"""Dataset evaluation of a predictor in single, vote or baseline mode."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from gridseg.exceptions import GridSegError, InputError
from gridseg.imaging.io import load_image, load_mask
from gridseg.imaging.raster import require_same_shape
from gridseg.services.dataset_service import DatasetManifest
from gridseg.services.metrics import (
    PRCurve,
    adaptive_fbeta,
    mae,
    majority_vote,
    max_fbeta,
    mean_curve,
    pr_curve,
)
from gridseg.services.prediction_service import SaliencyPredictor, predict_baseline, predict_saliency
from gridseg.utils.io import write_csv
from gridseg.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

MODES = ('single', 'vote', 'baseline')
REPORT_HEADER = ('image_id', 'mae', 'fbeta', 'precision', 'recall', 'tau')
PR_HEADER = ('tau', 'precision', 'recall')


@dataclass(frozen=True)
class ImageResult:
    image_id: str
    mae: float
    fbeta: float
    precision: float
    recall: float
    tau: float

    def as_row(self):
        return self.image_id, self.mae, self.fbeta, self.precision, self.recall, self.tau


@dataclass
class EvalReport:
    model: str
    mode: str
    granularities: Tuple[int, ...]
    results: List[ImageResult] = field(default_factory=list)
    curves: List[PRCurve] = field(default_factory=list, repr=False)
    excluded: int = 0
    parameters: Optional[int] = None

    @property
    def evaluated(self) -> int:
        return len(self.results)

    def _mean(self, attr: str) -> float:
        if not self.results:
            return float('nan')
        return float(np.mean([getattr(r, attr) for r in self.results]))

    @property
    def mean_mae(self) -> float:
        return self._mean('mae')

    @property
    def mean_fbeta(self) -> float:
        return self._mean('fbeta')

    @property
    def mean_precision(self) -> float:
        return self._mean('precision')

    @property
    def mean_recall(self) -> float:
        return self._mean('recall')

    @property
    def curve(self) -> PRCurve:
        """Dataset-averaged precision-recall curve."""
        return mean_curve(self.curves)

    @property
    def max_fbeta(self) -> float:
        return max_fbeta(self.curve) if self.curves else float('nan')

    def summary_lines(self) -> List[str]:
        return [
            f'model: {self.model}',
            f'mode: {self.mode}',
            f'granularities: {",".join(str(g) for g in self.granularities)}',
            f'images: {self.evaluated}',
            f'excluded: {self.excluded}',
            f'mean_mae: {self.mean_mae:.6f}',
            f'mean_fbeta: {self.mean_fbeta:.6f}',
            f'max_fbeta: {self.max_fbeta:.6f}',
        ]


def _evaluate_image(predictor: SaliencyPredictor, image_path: Path, mask_path: Path,
                    granularities: Sequence[int], mode: str):
    image = load_image(image_path)
    gt = load_mask(mask_path)
    require_same_shape(image.shape, gt.shape, f"{image_path.name} and {mask_path.name}")
    gt_arg = gt if predictor.needs_ground_truth else None

    if mode == 'single':
        saliency, _ = predict_saliency(predictor, image, granularities[0], gt_arg)
    elif mode == 'baseline':
        saliency = predict_baseline(predictor, image, granularities[0], gt_arg)
    else:
        maps = [predict_saliency(predictor, image, n, gt_arg)[0] for n in granularities]
        saliency = majority_vote(maps).data.astype(np.float64)

    f = adaptive_fbeta(saliency, gt)
    result = ImageResult(image_path.stem, mae(saliency, gt), f.fbeta, f.precision, f.recall, f.tau)
    return result, pr_curve(saliency, gt)


def evaluate_dataset(predictor: SaliencyPredictor, manifest: DatasetManifest,
                     granularities: Union[int, Sequence[int]], mode: str = 'single',
                     threads: int = 1) -> EvalReport:
    """Run the prediction pipeline on every pair and score it against the full-resolution mask.

    Single and baseline modes use the first granularity; vote mode uses all.
    Failing images are logged and counted as excluded.
    """
    if mode not in MODES:
        raise InputError(f"Unknown evaluation mode '{mode}', expected one of {MODES}")
    if isinstance(granularities, int):
        granularities = (granularities,)
    granularities = tuple(granularities)
    if not granularities:
        raise InputError("At least one granularity is required")

    def run(pair):
        try:
            return _evaluate_image(predictor, pair[0], pair[1], granularities, mode)
        except GridSegError as e:
            logger.warning("Excluding %s: %s", pair[0], e)
            return None

    report = EvalReport(predictor.name, mode, granularities, parameters=predictor.parameter_count())
    for outcome in ordered_map(run, manifest.pairs, threads):
        if outcome is None:
            report.excluded += 1
            continue
        result, curve = outcome
        report.results.append(result)
        report.curves.append(curve)
    logger.info("%s (%s): %d images, %d excluded, MAE %.4f, F-beta %.4f",
                report.model, mode, report.evaluated, report.excluded, report.mean_mae, report.mean_fbeta)
    return report


def write_report(report: EvalReport, out_dir: Union[str, Path], prefix: str = '') -> Tuple[Path, Path]:
    """Per-image report CSV and dataset-averaged PR-curve CSV."""
    out_dir = Path(out_dir)
    report_path = out_dir / f'{prefix}report.csv'
    pr_path = out_dir / f'{prefix}pr.csv'
    write_csv(report_path, REPORT_HEADER, (r.as_row() for r in report.results), report.summary_lines())
    curve = report.curve
    write_csv(pr_path, PR_HEADER, zip(curve.thresholds.tolist(), curve.precision.tolist(), curve.recall.tolist()))
    return report_path, pr_path
