"""|U| against z with markers on the even-integer lattice."""

import numpy as np


def render(ax, header, rows):
    data = np.array(rows, dtype=float)
    # columns: either (T, z, ReU, ImU, absU) or (eps, T, z, ReU, ImU, absU)
    off = 1 if header[0] == "T" else 2
    z = data[:, off]
    a = data[:, off + 3]
    ax.plot(z, a, "-o", ms=3.0, lw=1.2, color="#23527c")
    evens = np.arange(np.ceil(z.min() / 2.0) * 2, z.max() + 1e-9, 2.0)
    for ze in evens:
        ax.axvline(ze, color="0.8", lw=0.8, zorder=0)
    on = np.isin(z, evens)
    if on.any():
        ax.plot(z[on], a[on], "s", ms=7.0, mfc="none", mec="crimson",
                label="even lattice")
        ax.legend(loc="upper right", fontsize=8)
    ax.set_xlabel("z")
    ax.set_ylabel("|U(T, z)|")
    ax.set_title("interference scan: peaks on the moving lattice")
