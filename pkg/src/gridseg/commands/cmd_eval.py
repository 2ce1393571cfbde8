import re

import click

from gridseg.commands.errors import cli_errors
from gridseg.config import GridSegConfig
from gridseg.services.dataset_service import read_manifest
from gridseg.services.evaluation_service import MODES, evaluate_dataset, write_report
from gridseg.services.prediction_service import load_predictor
from gridseg.utils.io import ensure_out_dir, report_written, write_csv


def _file_prefix(name: str) -> str:
    return re.sub(r'[^A-Za-z0-9_.=-]+', '_', name) + '-'


@click.command('eval')
@click.option('--model', 'model_specs', multiple=True, required=True,
              help='Model file, stub:gt or stub:const=<v> (repeatable)')
@click.option('--manifest', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Test manifest (image<TAB>mask per line)')
@click.option('--mode', type=click.Choice(MODES), default='single', show_default=True)
@click.option('--n', 'granularities', type=int, multiple=True,
              help='Superpixel count; repeat for vote mode (default 950, vote 900..1000)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True, help='Output directory')
@click.option('--plots', is_flag=True, help='Also write SVG precision-recall and F-beta charts')
@click.option('--threads', type=int, default=None, help='Parallel image workers')
def evaluate(model_specs, manifest, mode, granularities, out_dir, plots, threads):
    """
    Evaluate models on a test manifest (MAE, adaptive F-beta, PR curve).

    Writes report.csv and pr.csv per model; with several models the files are
    prefixed by the model name and a summary.csv compares them.
    """
    if not granularities:
        granularities = (GridSegConfig.get_vote_granularities() if mode == 'vote'
                         else (GridSegConfig.get_granularity(),))
    threads = threads or GridSegConfig.get_threads()

    with cli_errors():
        test_set = read_manifest(manifest, 'test')
        out = ensure_out_dir(out_dir)
        reports = []
        for spec in model_specs:
            predictor = load_predictor(spec)
            report = evaluate_dataset(predictor, test_set, granularities, mode, threads)
            prefix = _file_prefix(predictor.name) if len(model_specs) > 1 else ''
            for path in write_report(report, out, prefix):
                report_written(path)
            reports.append(report)
            click.echo(click.style(
                f'{report.model}: MAE {report.mean_mae:.4f}  F-beta {report.mean_fbeta:.4f}  '
                f'max F-beta {report.max_fbeta:.4f}  ({report.evaluated} images, {report.excluded} excluded)',
                fg='blue'
            ))

        if len(reports) > 1:
            summary_path = out / 'summary.csv'
            write_csv(summary_path, ('model', 'mode', 'parameters', 'images', 'excluded', 'mae', 'fbeta', 'max_fbeta'),
                      ((r.model, r.mode, r.parameters or '', r.evaluated, r.excluded,
                        r.mean_mae, r.mean_fbeta, r.max_fbeta) for r in reports))
            report_written(summary_path)

    if plots:
        from gridseg.services.plotting import plot_fbeta_vs_parameters, plot_pr_curves
        report_written(plot_pr_curves(reports, out / 'pr.svg'))
        report_written(plot_fbeta_vs_parameters(reports, out / 'fbeta.svg'))
