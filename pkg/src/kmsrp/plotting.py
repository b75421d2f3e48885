"""Optional figure rendering for sampled CSV data.

The CLI writes delimited samples by default; with ``--plot`` it also
renders the sampled curves to a PNG next to the CSV via this module.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_series(ts, series, out_path, title=None, xlabel="t"):
    """Plot named scalar series over a common grid and save to ``out_path``.

    Parameters
    ----------
    ts : 1-d array of grid points
    series : dict name -> 1-d array
    out_path : file path for the figure (format from the extension)
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for name, ys in series.items():
        ax.plot(ts, ys, label=name, linewidth=1.2)
    ax.set_xlabel(xlabel)
    if title:
        ax.set_title(title)
    if series:
        ax.legend(loc="best", fontsize=8)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
