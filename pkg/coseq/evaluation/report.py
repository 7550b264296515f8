from dataclasses import dataclass
from pathlib import Path
from typing import List, Mapping, Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  pylint: disable=wrong-import-position
import pandas as pd  # noqa: E402  pylint: disable=wrong-import-position

from ..exceptions import ConfigurationError  # noqa: E402  pylint: disable=wrong-import-position
from ..logger import get_logger  # noqa: E402  pylint: disable=wrong-import-position

logger = get_logger()

PathLike = Union[str, Path]

# svg ids derive from the salt, not from random state
SVG_RC = {"svg.hashsalt": "coseq", "svg.fonttype": "path", "font.size": 9}


@dataclass(frozen=True)
class ChartSpec:
    table: str
    kind: str
    x: str
    y: str
    label: Optional[str] = None
    title: str = ""


def write_table(table: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(path, index=False, float_format="%.6f")
    return path


def read_table(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(Path(path))


def write_chart(table: pd.DataFrame, spec: ChartSpec, path: PathLike) -> Path:
    if spec.kind not in ("scatter", "bar"):
        raise ConfigurationError(f"unknown chart kind '{spec.kind}'")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(SVG_RC):
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        if spec.kind == "scatter":
            ax.scatter(table[spec.x], table[spec.y], s=18)
            if spec.label:
                for _, row in table.iterrows():
                    ax.annotate(str(row[spec.label]), (row[spec.x], row[spec.y]), fontsize=7)
        else:
            ax.bar([str(v) for v in table[spec.x]], table[spec.y])
        ax.set_xlabel(spec.x)
        ax.set_ylabel(spec.y)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path


def report(
    tables: Mapping[str, pd.DataFrame],
    out_dir: PathLike,
    charts: Optional[Mapping[str, ChartSpec]] = None,
) -> List[Path]:
    """Write every table as ``<name>.csv`` and every chart as ``<name>.svg``."""
    out_dir = Path(out_dir)
    written = [write_table(table, out_dir / f"{name}.csv") for name, table in sorted(tables.items())]
    for name, spec in sorted((charts or {}).items()):
        written.append(write_chart(tables[spec.table], spec, out_dir / f"{name}.svg"))
    logger.success("Wrote %d report files to %s", len(written), out_dir)
    return written


__all__ = ["ChartSpec", "write_table", "read_table", "write_chart", "report"]
