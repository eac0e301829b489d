"""Dispersion curve with its horizontal asymptote."""

import numpy as np


def render(ax, header, rows):
    data = np.array([[c for c in r] for r in rows], dtype=float)
    xi = data[:, 0]
    for j, name in enumerate(header[1:-1], start=1):
        ax.plot(xi, data[:, j], lw=1.6, label=name)
    ax.axhline(data[0, -1], color="magenta", ls="--", lw=1.0,
               label="asymptote")
    ax.set_xlabel(r"$\xi$")
    ax.set_ylabel(r"$p(\xi)$")
    ax.set_title("dispersion curves approaching the resonance level")
    ax.set_ylim(-0.02, 1.1)
    ax.legend(loc="lower right", fontsize=8)
