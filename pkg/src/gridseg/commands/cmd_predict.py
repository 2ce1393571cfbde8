from pathlib import Path

import click

from gridseg.commands.errors import cli_errors
from gridseg.config import GridSegConfig
from gridseg.imaging.io import load_image, save_image, save_label_map
from gridseg.services.prediction_service import load_predictor, predict_saliency
from gridseg.utils.io import ensure_out_dir, report_written


@click.command()
@click.option('--model', 'model_spec', required=True, help='Model file (stub:gt is not usable here)')
@click.argument('image', type=click.Path(exists=True, dir_okay=False))
@click.option('--n', 'target_n', type=int, default=None, help='Number of superpixels (default 950)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True, help='Output directory')
@click.option('--save-grid', is_flag=True, help='Also write the label map the prediction was made on')
def predict(model_spec: str, image: str, target_n: int, out_dir: str, save_grid: bool):
    """Predict a full-resolution saliency map for one image."""
    target_n = target_n or GridSegConfig.get_granularity()
    with cli_errors():
        predictor = load_predictor(model_spec)
        if predictor.needs_ground_truth:
            raise click.UsageError(f'{model_spec} needs ground truth and cannot be used for prediction')
        img = load_image(image)
        saliency, grid = predict_saliency(predictor, img, target_n)

        out = ensure_out_dir(out_dir)
        stem = Path(image).stem
        written = [out / f'{stem}.saliency.png']
        save_image(saliency, written[0])
        if save_grid:
            written.append(out / f'{stem}.labels.pgm')
            save_label_map(grid.labels, written[1])

    for path in written:
        report_written(path)
