from pathlib import Path

import click

from gridseg.commands.errors import cli_errors
from gridseg.config import GridSegConfig
from gridseg.grid.gridizer import gridize
from gridseg.imaging.io import load_image, load_mask, save_image
from gridseg.imaging.raster import require_same_shape
from gridseg.services.encoding_service import encode_image, encode_label, minmax_normalize, reconstruct
from gridseg.utils.io import ensure_out_dir, report_written
from gridseg.utils.tensor_codec import write_tensor


@click.command()
@click.argument('image', type=click.Path(exists=True, dir_okay=False))
@click.argument('mask', type=click.Path(exists=True, dir_okay=False), required=False)
@click.option('--n', 'target_n', type=int, default=None, help='Number of superpixels (default 950)')
@click.option('--out', 'out_dir', type=click.Path(file_okay=False), required=True, help='Output directory')
@click.option('--normalize', is_flag=True, help='Store the min-max normalized network input instead of mean colors')
def encode(image: str, mask: str, target_n: int, out_dir: str, normalize: bool):
    """
    Encode an image (and optionally its mask) onto the superpixel grid.

    Writes GRDT tensor blobs and previews reconstructed from them.
    """
    target_n = target_n or GridSegConfig.get_granularity()
    with cli_errors():
        img = load_image(image)
        gt = load_mask(mask) if mask else None
        if gt is not None:
            require_same_shape(img.shape, gt.shape, "image and mask")
        grid = gridize(img, target_n)
        out = ensure_out_dir(out_dir)
        stem = Path(image).stem

        x = encode_image(img, grid)
        written = [out / f'{stem}.X.grdt', out / f'{stem}.preview.png']
        write_tensor(minmax_normalize(x) if normalize else x, written[0])
        save_image(reconstruct(x, grid), written[1])

        if gt is not None:
            y = encode_label(gt, grid)
            written += [out / f'{stem}.Y.grdt', out / f'{stem}.gt-preview.png']
            write_tensor(y, written[2])
            save_image(reconstruct(y, grid), written[3])

    for path in written:
        report_written(path)
    click.echo(click.style(f'Encoded onto {grid.dims.rows}x{grid.dims.cols} cells', fg='blue'))
