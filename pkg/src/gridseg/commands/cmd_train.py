from pathlib import Path

import click

from gridseg.commands.errors import cli_errors
from gridseg.nn.serialization import save_model
from gridseg.services.dataset_service import check_disjoint, read_manifest
from gridseg.services.training_service import load_train_config, train, write_training_log
from gridseg.utils.io import report_written


def _granularity_list(ctx, param, value):
    if value is None:
        return None
    try:
        return tuple(int(v) for v in value.split(',') if v.strip())
    except ValueError:
        raise click.BadParameter(f'expected comma-separated integers, got {value!r}')


@click.command('train')
@click.option('--config', 'config_path', default=None,
              help='key=value config file, or a bundled name such as "toy" or "full"')
@click.option('--train-manifest', 'train_manifests', type=click.Path(exists=True, dir_okay=False),
              multiple=True, required=True, help='Training manifest (repeatable)')
@click.option('--val-manifest', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Validation manifest')
@click.option('--out-model', type=click.Path(dir_okay=False), required=True,
              help='Model file; the log CSV is written next to it')
@click.option('--filters', type=int, default=None, help='Feature maps per layer (16 or 32)')
@click.option('--granularities', callback=_granularity_list, default=None,
              help='Comma-separated superpixel counts')
@click.option('--batch-size', type=int, default=None)
@click.option('--learning-rate', type=float, default=None)
@click.option('--max-iterations', type=int, default=None)
@click.option('--validation-interval', type=int, default=None)
@click.option('--encoding', type=click.Choice(['grid', 'bicubic']), default=None,
              help='Gridized superpixels or plain bicubic downsampling')
@click.option('--seed', type=int, default=None)
@click.option('--threads', type=int, default=None, help='Workers for sample preparation')
@click.option('--deterministic', is_flag=True, default=None, help='Single-threaded, reproducible run')
def train_model(config_path, train_manifests, val_manifest, out_model, filters, granularities, batch_size,
                learning_rate, max_iterations, validation_interval, encoding, seed, threads, deterministic):
    """
    Train a saliency network on encoded image/mask pairs.

    Keeps the parameters with the lowest validation loss.
    """
    out_model = Path(out_model)
    out_dir = out_model.parent
    log_path = out_dir / f'{out_model.stem}.log.csv'

    with cli_errors():
        config = load_train_config(
            config_path, filters=filters, granularities=granularities, batch_size=batch_size,
            learning_rate=learning_rate, max_iterations=max_iterations,
            validation_interval=validation_interval, encoding=encoding, seed=seed,
            threads=threads, deterministic=deterministic,
        )
        train_sets = [read_manifest(path, 'train') for path in train_manifests]
        val_set = read_manifest(val_manifest, 'validation')
        check_disjoint(*train_sets, val_set)

        click.echo(click.style(
            f'Filters: {config.filters}, granularities: {list(config.granularities)}, '
            f'iterations: {config.max_iterations}', fg='blue'
        ))
        out_dir.mkdir(parents=True, exist_ok=True)
        result = train(config, train_sets, val_set, diagnostics_dir=out_dir)
        save_model(result.model, out_model)
        write_training_log(result.log, log_path)

    report_written(out_model)
    report_written(log_path)
    click.echo(click.style(
        f'Best validation loss {result.best_val_loss:.6f} at iteration {result.best_iteration} '
        f'({result.skipped_samples} samples skipped)', fg='blue'
    ))
