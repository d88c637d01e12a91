"""Figures for HSV decay and frequency responses."""
import logging

import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns
from matplotlib.figure import Figure

from .reduction import error_bound_curve

logger = logging.getLogger(__name__)

COLORS = ['#3498db', '#2ecc71', '#e74c3c', '#f1c40f', '#9b59b6', '#1abc9c', '#34495e']

RC = {
    'font.family': 'DejaVu Sans',
    'font.size': 10,
    'axes.titlesize': 14,
    'figure.titlesize': 16,
    'axes.labelsize': 12,
    'xtick.labelsize': 10,
    'ytick.labelsize': 10,
}


class Chart:
    """Base class for a single saved figure"""
    def __init__(self, title="Chart", figsize=(8, 5), dpi=100, rows=1):
        self.title = title
        self.logger = logging.getLogger(__name__)
        self.figure = Figure(figsize=figsize, dpi=dpi)
        with self.style():
            self.axes = [self.figure.add_subplot(rows, 1, k + 1) for k in range(rows)]
        self.figure.suptitle(title)

    @staticmethod
    def style():
        """whitegrid style with the chart palette, without touching global rcParams."""
        rc = dict(RC, **{'axes.prop_cycle': plt.cycler(color=COLORS)})
        return plt.rc_context(rc | dict(sns.axes_style('whitegrid')))

    def draw(self):
        raise NotImplementedError("Subclasses must implement draw()")

    def save(self, path):
        with self.style():
            self.draw()
            self.figure.tight_layout()
            self.figure.savefig(path)
        self.logger.info(f"Saved '{self.title}' to {path}")
        return path


class HsvChart(Chart):
    """HSV bars on a log scale with the truncation bound for every order"""
    def __init__(self, hsv, order=None, title="Hankel singular values"):
        super().__init__(title=title)
        self.hsv = np.asarray(hsv, dtype=float)
        self.order = order

    def draw(self):
        ax = self.axes[0]
        if self.hsv.size == 0:
            ax.text(0.5, 0.5, "No states", ha='center', va='center', transform=ax.transAxes, fontsize=14)
            return
        index = np.arange(1, self.hsv.size + 1)
        positive = np.where(self.hsv > 0, self.hsv, np.nan)
        ax.bar(index, positive, color=COLORS[0], alpha=0.8, label='HSV')
        bounds = error_bound_curve(self.hsv)[:-1]
        ax.plot(index - 1 + 0.5, np.where(bounds > 0, bounds, np.nan), marker='o',
                color=COLORS[2], label='upper bound after truncating to r')
        if self.order is not None:
            ax.axvline(self.order + 0.5, color=COLORS[6], linestyle='--', label=f'r = {self.order}')
        ax.set_yscale('log')
        ax.set_xlabel('index')
        ax.set_ylabel('value')
        ax.legend()


class BodeChart(Chart):
    """Magnitude and phase of one or more responses on a shared grid"""
    def __init__(self, responses, labels, output=0, input=0, title="Frequency response"):
        super().__init__(title=title, figsize=(8, 7), rows=2)
        self.responses = list(responses)
        self.labels = list(labels)
        self.output = output
        self.input = input

    def draw(self):
        mag_ax, phase_ax = self.axes
        for k, (response, label) in enumerate(zip(self.responses, self.labels)):
            keep = response.omegas > 0
            omegas = response.omegas[keep]
            color = COLORS[k % len(COLORS)]
            mag_ax.loglog(omegas, response.amplitude(self.output, self.input)[keep], color=color, label=label)
            phase_ax.semilogx(omegas, np.degrees(response.phase(self.output, self.input)[keep]),
                              color=color, label=label)
        mag_ax.set_ylabel('|H(iw)|')
        phase_ax.set_ylabel('phase [deg]')
        phase_ax.set_xlabel('w [rad/s]')
        mag_ax.legend()


def plot_hsv(hsv, path, order=None):
    return HsvChart(hsv, order).save(path)


def plot_bode(responses, labels, path, output=0, input=0):
    if len(responses) != len(labels):
        raise ValueError(f"{len(responses)} responses but {len(labels)} labels")
    return BodeChart(responses, labels, output, input).save(path)
