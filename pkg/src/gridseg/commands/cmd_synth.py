import click

from gridseg.commands.errors import cli_errors
from gridseg.services.synthetic_service import MANIFEST_NAME, generate_synthetic


@click.command()
@click.option('--count', type=click.IntRange(min=1), required=True, help='Number of image/mask pairs')
@click.option('--seed', type=int, default=0, show_default=True)
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True, help='Output directory')
@click.option('--thin', is_flag=True, help='Attach thin bars to the objects')
def synth(count: int, seed: int, out_dir: str, thin: bool):
    """Generate a synthetic salient-object dataset with a manifest."""
    with cli_errors():
        manifest = generate_synthetic(count, seed, out_dir, thin)
    click.echo(click.style(f'{len(manifest)} pairs, manifest {out_dir}/{MANIFEST_NAME}', fg='green'))
