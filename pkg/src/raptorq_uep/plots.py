"""Figure rendering for experiment, timing, and rank reports.

Pure consumers of the report objects: nothing here feeds back into the
simulation or the CSV files. Files are written atomically.
"""

from __future__ import annotations

import os
import tempfile

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .codeparams import ImportanceClass

_STYLE = {
    ImportanceClass.LIB: dict(color="#d62728", marker="o", label="LIB"),
    ImportanceClass.MIB: dict(color="#1f77b4", marker="s", label="MIB"),
}


def _atomic_savefig(fig, path):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".png")
    os.close(fd)
    try:
        fig.savefig(tmp, format="png", dpi=120, bbox_inches="tight")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    finally:
        plt.close(fig)


def failure_curves(report, path):
    """Per-class failure probability vs erasure probability, log scale."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    any_positive = False
    for cls in (ImportanceClass.LIB, ImportanceClass.MIB):
        pts = report.stats[cls]
        xs = [st.erasure_p for st in pts]
        ys = [st.failure_rate for st in pts]
        errs = [st.ci95 for st in pts]
        any_positive = any_positive or any(y > 0 for y in ys)
        ax.errorbar(xs, ys, yerr=errs, capsize=3, **_STYLE[cls])
    if any_positive:
        ax.set_yscale("log")
    ax.set_xlabel("erasure probability")
    ax.set_ylabel("decode failure probability")
    ax.set_title("K=%d, overhead=%d, %d trials/point"
                 % (report.K, report.overhead, report.trials))
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _atomic_savefig(fig, path)


def timing_bars(reports, path):
    """Encode+decode wall time per class per K, with the relative increase."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ks = [rep.K for rep in reports]
    x = range(len(reports))
    width = 0.35
    for off, cls in ((-width / 2, ImportanceClass.LIB),
                     (width / 2, ImportanceClass.MIB)):
        totals = [(rep.median_encode_ns[cls] + rep.median_decode_ns[cls]) / 1e6
                  for rep in reports]
        ax.bar([xi + off for xi in x], totals, width,
               color=_STYLE[cls]["color"], label=_STYLE[cls]["label"])
    for xi, rep in zip(x, reports):
        mib = (rep.median_encode_ns[ImportanceClass.MIB]
               + rep.median_decode_ns[ImportanceClass.MIB]) / 1e6
        ax.annotate("+%.1f%%" % rep.pct_increase(), (xi + width / 2, mib),
                    textcoords="offset points", xytext=(0, 4), ha="center")
    ax.set_xticks(list(x), ["K=%d" % k for k in ks])
    ax.set_ylabel("median encode+decode solve time (ms)")
    ax.set_title("codec wall time by importance class")
    ax.grid(True, axis="y", alpha=0.3)
    ax.legend()
    _atomic_savefig(fig, path)


def rank_curves(rows, path):
    """Analytic full-rank probabilities vs H."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    hs = [r.H for r in rows]
    ax.plot(hs, [r.p_r_exact for r in rows], "o-", label="p_r (random rows)")
    ax.plot(hs, [r.p_K_exact for r in rows], "s-", label="p_K exact")
    ax.plot(hs, [r.p_K_approx for r in rows], "s--", alpha=0.6, label="p_K approx")
    ax.plot(hs, [r.p_N for r in rows], "d-", label="p_N combined")
    ax.set_xlabel("dense precode rows H")
    ax.set_ylabel("full-rank probability")
    ax.set_title("full-rank probability vs dense precode size (q=%d)" % rows[0].q)
    ax.grid(True, alpha=0.3)
    ax.legend()
    _atomic_savefig(fig, path)
