"""Log-log convergence panel with a fitted slope annotation."""

import numpy as np


def render(ax, header, rows):
    data = np.array(rows, dtype=float)
    eps = data[:, 0]
    # plot every positive column against eps
    drew = False
    for j, name in enumerate(header[1:], start=1):
        vals = data[:, j]
        if np.all(vals > 0.0):
            ax.loglog(eps, vals, "-o", ms=4, label=name)
            drew = True
    if drew and len(eps) >= 2:
        vals = data[:, -1]
        if np.all(vals > 0):
            slope = np.polyfit(np.log(eps), np.log(vals), 1)[0]
            ax.text(0.04, 0.06, rf"fitted order $O(\varepsilon^{{{slope:.2f}}})$",
                    transform=ax.transAxes, fontsize=9)
    ax.set_xlabel(r"$\varepsilon$")
    ax.set_title("ladder convergence")
    ax.legend(fontsize=7, loc="best")
