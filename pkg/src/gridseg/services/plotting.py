"""SVG charts of evaluation reports."""

import logging
from pathlib import Path
from typing import Sequence, Union

logger = logging.getLogger(__name__)


def _pyplot():
    import matplotlib
    matplotlib.use('Agg')
    import matplotlib.pyplot as plt
    return plt


def plot_pr_curves(reports: Sequence, path: Union[str, Path]) -> Path:
    """Dataset-averaged precision-recall curves, one line per report."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    for report in reports:
        curve = report.curve
        ax.plot(curve.recall, curve.precision, label=f'{report.model} ({report.mode})')
    ax.set_xlabel('Recall')
    ax.set_ylabel('Precision')
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc='lower left', fontsize='small')
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    return Path(path)


def plot_fbeta_vs_parameters(reports: Sequence, path: Union[str, Path]) -> Path:
    """Bars of mean adaptive F-beta with each model's parameter count on a log axis."""
    plt = _pyplot()
    labels = [f'{r.model}\n({r.mode})' for r in reports]
    scores = [r.mean_fbeta for r in reports]
    params = [r.parameters or 0 for r in reports]

    fig, ax = plt.subplots(figsize=(max(4, 1.4 * len(reports)), 4))
    positions = list(range(len(reports)))
    ax.bar(positions, scores, color='tab:blue', width=0.6)
    ax.set_xticks(positions)
    ax.set_xticklabels(labels, fontsize='small')
    ax.set_ylabel('Adaptive F-beta')
    ax.set_ylim(0, 1)

    if any(params):
        twin = ax.twinx()
        twin.plot(positions, [p if p > 0 else float('nan') for p in params], 'o', color='tab:red')
        twin.set_yscale('log')
        twin.set_ylabel('Parameters')
    fig.tight_layout()
    fig.savefig(path, format='svg')
    plt.close(fig)
    return Path(path)
