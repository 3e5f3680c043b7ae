"""Matplotlib figures written next to the delimited report tables."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "figure.figsize": (6.4, 4.0),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "font.size": 10,
    "savefig.dpi": 120,
    # fixed metadata keeps files reproducible
    "svg.hashsalt": "autonum",
}


def _save(fig, path: Path | str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_values(ns: Sequence[int], values: Sequence, path, oracle: Sequence | None = None,
                title: str = "", ylabel: str = "f(n)") -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(ns, [float(x) for x in values], ".", ms=3, label="representation")
        if oracle is not None:
            ax.plot(ns, [float(x) for x in oracle], "-", lw=0.6, alpha=0.7, label="brute force")
            ax.legend()
        ax.set_xlabel("n")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_ratios(ts: Sequence[int], ratios: Sequence[Fraction], path, root=None,
                expected: Fraction | None = None, title: str = "") -> Path:
    """value(t) / root^t on a symlog axis, with an optional reference level."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ys = [float(r) for r in ratios]
        ax.plot(ts, ys, "o-", ms=3, lw=0.8, label=f"value / {root}^t" if root is not None else "ratio")
        if expected is not None:
            ax.axhline(float(expected), color="C3", ls="--", lw=0.8, label=f"reference {expected}")
        finite = [abs(y) for y in ys if y] + ([abs(float(expected))] if expected else [])
        ax.set_yscale("symlog", linthresh=min(finite) if finite else 1.0)
        ax.set_xlabel("t")
        ax.legend()
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_differences(ns: Sequence[int], values: Sequence, path, violations: Sequence[int] = (),
                     title: str = "") -> Path:
    """f(n+1) - f(n), marking the n where it is not positive."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        diffs = [float(b) - float(a) for a, b in zip(values, values[1:])]
        ax.plot(ns[: len(diffs)], diffs, lw=0.7)
        bad = set(violations)
        xs = [n for n in ns[: len(diffs)] if n in bad]
        if xs:
            ax.plot(xs, [diffs[ns.index(n)] for n in xs], "x", color="C3", label="f(n+1) <= f(n)")
            ax.legend()
        ax.set_yscale("symlog", linthresh=1.0)
        ax.set_xlabel("n")
        ax.set_ylabel("f(n+1) - f(n)")
        if title:
            ax.set_title(title)
        return _save(fig, path)
