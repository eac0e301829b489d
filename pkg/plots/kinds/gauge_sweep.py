"""sup|W| per gauge class across the ladder."""

import numpy as np


def render(ax, header, rows):
    n_eps = sum(1 for h in header if h.startswith("sup_absW"))
    width = 0.8 / max(n_eps, 1)
    xs = np.arange(len(rows))
    for i in range(n_eps):
        vals = [float(r[3 + i]) for r in rows]
        ax.bar(xs + i * width, vals, width,
               label=header[3 + i].replace("sup_absW_", ""))
    ax.set_yscale("log")
    ax.set_xticks(xs + 0.4 - width / 2)
    ax.set_xticklabels([f"g={float(r[0]):+.1f}\n{r[1]}" for r in rows], fontsize=8)
    ax.set_ylabel("sup |W|")
    ax.set_title("first-iterate size per gauge class")
    ax.legend(fontsize=8)
