# -*- coding: utf-8 -*-

"""Top-level package for gridized-superpixel salient object segmentation"""

import logging

import click
from dotenv import find_dotenv, load_dotenv

from gridseg import commands
from gridseg.config import GridSegConfig


__author__ = """Maxim Moroz"""
__email__ = 'mmua@users.noreply.github.com'
__version__ = '0.1.0'


_ = load_dotenv(find_dotenv())

# format='%(message)s' gives clean output without logger-name prefixes.
logging.basicConfig(level=GridSegConfig.get_log_level(), format='%(message)s')


@click.group()
@click.version_option(__version__, prog_name='gridseg')
def cli():
    """Salient object segmentation on gridized superpixels"""


# Add commands
cli.add_command(commands.gridify)
cli.add_command(commands.encode)
cli.add_command(commands.train_model)
cli.add_command(commands.predict)
cli.add_command(commands.evaluate)
cli.add_command(commands.synth)
