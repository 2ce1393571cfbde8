from pathlib import Path

import click

from gridseg.commands.errors import cli_errors
from gridseg.config import GridSegConfig
from gridseg.grid.gridizer import gridize, render_overlay, write_grid_metadata
from gridseg.imaging.io import load_image, save_image, save_label_map
from gridseg.utils.io import ensure_out_dir, report_written


@click.command()
@click.argument('image', type=click.Path(exists=True, dir_okay=False))
@click.option('--n', 'target_n', type=int, default=None, help='Number of superpixels (default 950)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True, help='Output directory')
@click.option('--overlay', is_flag=True, help='Also write the image with cell boundaries drawn on it')
def gridify(image: str, target_n: int, out_dir: str, overlay: bool):
    """
    Gridize an image into a boundary-adherent superpixel lattice.

    Writes the label map (16-bit PGM, cell index r*C+c) and JSON metadata.
    """
    target_n = target_n or GridSegConfig.get_granularity()
    with cli_errors():
        img = load_image(image)
        grid = gridize(img, target_n)
        out = ensure_out_dir(out_dir)
        stem = Path(image).stem

        labels_path = out / f'{stem}.labels.pgm'
        meta_path = out / f'{stem}.grid.json'
        save_label_map(grid.labels, labels_path)
        write_grid_metadata(grid, meta_path, target_n)
        report_written(labels_path)
        report_written(meta_path)
        if overlay:
            overlay_path = out / f'{stem}.overlay.png'
            save_image(render_overlay(img, grid), overlay_path)
            report_written(overlay_path)

    click.echo(click.style(
        f'Grid {grid.dims.rows}x{grid.dims.cols} ({grid.dims.cells} cells), '
        f'fallback: {"yes" if grid.fallback else "no"}', fg='blue'
    ))
