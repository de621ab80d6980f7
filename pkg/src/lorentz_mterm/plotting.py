"""Log-log figures for rate sweeps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .verify import RateFitResult  # noqa: E402


def rate_figure(result: RateFitResult, path, title: str = "") -> None:
    """Errors, the fitted line and a reference line with the predicted slope."""
    M = np.array(result.Ms, dtype=float)
    err = np.array(result.errors)
    fig, ax = plt.subplots(figsize=(5, 3.6))
    ax.loglog(M, err, "o", base=2, label="error")
    ax.loglog(M, 2.0**result.intercept * M**result.slope, "-", base=2,
              label=f"fit, slope {result.slope:.3f}")
    ref = err[0] * (M / M[0]) ** result.predicted_slope
    ax.loglog(M, ref, "--", base=2, label=f"predicted {result.predicted_slope:.3f}")
    certs = [pt.certificate for pt in result.points]
    if all(c is not None and c > 0 for c in certs):
        ax.loglog(M, certs, "x", base=2, label="dual certificate")
    ax.set_xlabel("M")
    ax.set_ylabel("error")
    if title:
        ax.set_title(title)
    ax.legend(fontsize=8)
    fig.tight_layout()
    # no Software/date metadata so reruns are byte-identical
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
