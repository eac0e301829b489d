"""Per-packet diagnostics: critical times, Hessians, amplitudes."""

import numpy as np


def render(ax, header, rows):
    data = np.array([r for r in rows if not isinstance(r[1], str)], dtype=float)
    k = data[:, 1]
    ax.plot(k, data[:, 2], "o", ms=4, label=r"$s_k$")
    ax.plot(k, data[:, 4], "s", ms=4, label=r"$\det S_k$")
    ax2 = ax.twinx()
    ax2.plot(k, data[:, 6], "^", ms=4, color="seagreen", label=r"$|b_k|$")
    ax2.set_ylabel("|b_k|", color="seagreen")
    ax.set_xlabel("packet index k")
    ax.set_title("wave-packet gallery")
    ax.legend(loc="upper left", fontsize=8)
