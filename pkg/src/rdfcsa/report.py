"""Space/time sweeps and the figures the CLI writes next to them."""

import random
import time

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from . import fileformat  # noqa: E402
from .core import ROLE_NAMES, ROLES, Rdfcsa  # noqa: E402
from .psi import PLAIN, T_PSI_CHOICES, PsiSegment  # noqa: E402
from .query import locate  # noqa: E402

RAW_BYTES_PER_TRIPLE = 12
TIMED_SHAPES = ("spo", "sp?", "s?o", "?po", "s??", "?p?", "??o")


def raw_bytes(n):
    return RAW_BYTES_PER_TRIPLE * n


def index_bytes(idx, dictionary=None):
    """Serialized size of the index file."""
    return len(fileformat.pack(idx, dictionary))


def segment_ratios(idx):
    """role name -> (stored bytes, plain bytes) for each Psi segment."""
    out = {}
    for role in ROLES:
        seg = idx.segments[role]
        plain = seg if seg.mode == PLAIN else PsiSegment.build(seg.to_list(), PLAIN, idx.t_psi)
        out[ROLE_NAMES[role]] = (len(seg.to_bytes()), len(plain.to_bytes()))
    return out


def sample_patterns(triples, shape, count, rng):
    out = []
    for _ in range(count):
        t = rng.choice(triples)
        out.append(tuple(t[k] if shape[k] != "?" else None for k in range(3)))
    return out


def time_queries(idx, patterns, strategy=None):
    """Mean microseconds per pattern to locate and materialize all answers."""
    if not patterns:
        return 0.0
    t0 = time.perf_counter()
    for tp in patterns:
        locate(idx, tp, strategy if sum(v is not None for v in tp) >= 2 else None).triples()
    return (time.perf_counter() - t0) / len(patterns) * 1e6


def sweep(ts, tpsis=T_PSI_CHOICES, modes=("compressed", "hybrid"), queries=200, seed=0):
    """One row per (mode, t_psi): sizes, ratio to raw and per-shape timings."""
    rows = []
    triples = ts.as_tuples()
    for mode in modes:
        for t in tpsis:
            idx = Rdfcsa.build(ts, mode=mode, t_psi=t)
            size = index_bytes(idx)
            row = {"mode": mode, "t_psi": t, "n": ts.n, "bytes": size,
                   "ratio": size / raw_bytes(ts.n)}
            for name, (stored, plain) in segment_ratios(idx).items():
                row[f"psi_{name.lower()}_ratio"] = stored / plain if plain else 1.0
            rng = random.Random(seed)
            for shape in TIMED_SHAPES:
                pats = sample_patterns(triples, shape, queries, rng)
                row[f"us_{shape}"] = time_queries(idx, pats)
            rows.append(row)
    return rows


# -- figures ----------------------------------------------------------------------


def _finish(fig, ax, path):
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_space(rows, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for mode in sorted({r["mode"] for r in rows}):
        pts = sorted((r["t_psi"], 100 * r["ratio"]) for r in rows if r["mode"] == mode)
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=mode)
    ax.axhline(100, color="grey", lw=0.8, ls="--")
    ax.set_xscale("log", base=2)
    ax.set_xlabel("Psi sampling period t_psi")
    ax.set_ylabel("index size (% of 12n bytes)")
    ax.legend()
    _finish(fig, ax, path)


def plot_times(rows, path):
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    for mode in sorted({r["mode"] for r in rows}):
        sel = sorted((r for r in rows if r["mode"] == mode), key=lambda r: r["t_psi"])
        for shape in TIMED_SHAPES:
            ax.plot([r["t_psi"] for r in sel], [r[f"us_{shape}"] for r in sel],
                    marker=".", ls="-" if mode == "compressed" else ":",
                    label=f"{shape} ({mode})")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log")
    ax.set_xlabel("Psi sampling period t_psi")
    ax.set_ylabel("microseconds per query")
    ax.legend(fontsize=6, ncol=2)
    _finish(fig, ax, path)


def plot_sections(sizes, path):
    names = [k for k in sizes if sizes[k]]
    fig, ax = plt.subplots(figsize=(5.5, 3.6))
    ax.barh(names, [sizes[k] for k in names], color="tab:blue")
    ax.set_xlabel("bytes")
    ax.invert_yaxis()
    _finish(fig, ax, path)
    return names

