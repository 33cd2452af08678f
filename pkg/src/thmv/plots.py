"""Figure rendering for fit reports.

Optional presentation layer: the CSV and the printed fit report are the
product; a figure is written only when the CLI is asked for one.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .costmodel import ExponentFit  # noqa: E402


def render_fit_figure(
    fit: ExponentFit, out_path: str | Path, title: str = "counted multiplications"
) -> Path:
    """Log-log scatter of the fitted samples with the fitted power law."""
    out_path = Path(out_path)
    ns = [n for n, _ in fit.samples]
    cs = [c for _, c in fit.samples]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.plot(ns, cs, "o", alpha=0.6, label="measured")
    n_lo, n_hi = min(ns), max(ns)
    line_x = [n_lo, n_hi]
    line_y = [2**fit.intercept * x**fit.slope for x in line_x]
    ax.plot(line_x, line_y, "--", label=f"fit: n^{fit.slope:.3f} (r2={fit.r2:.4f})")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("semiring multiplications")
    ax.set_title(title)
    ax.grid(True, which="both", ls=":", alpha=0.4)
    ax.legend()
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return out_path
