"""Common I/O utilities for CLI commands."""

import csv
from pathlib import Path
from typing import Iterable, Optional, Sequence

import click


def ensure_out_dir(out_dir: str) -> Path:
    """Create the output directory (and parents) if missing."""
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence],
              comments: Optional[Sequence[str]] = None) -> None:
    """
    Write a CSV file with optional leading `#` comment lines.

    Args:
        path: Destination file
        header: Column names
        rows: Row values; floats are written with repr precision
        comments: Lines emitted before the header, each prefixed with '# '
    """
    with open(path, 'w', encoding='utf-8', newline='') as f:
        for line in comments or ():
            f.write(f'# {line}\n')
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_value(v) for v in row])


def read_csv(path: Path):
    """Read a CSV written by `write_csv`, skipping comment lines."""
    with open(path, 'r', encoding='utf-8', newline='') as f:
        lines = [line for line in f if not line.startswith('#')]
    return list(csv.DictReader(lines))


def format_value(value) -> str:
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, float):
        return f'{value:.6f}'
    return str(value)


def report_written(path: Path) -> None:
    click.echo(click.style(f'Written to {path}', fg='green'))
