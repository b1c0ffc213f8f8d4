"""Functional datasets: curves sampled over a shared monotone grid"""

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import ArgumentError, CsvParseError, DataError, ValidationError

logger = logging.getLogger(__name__)

# Uniform grid used by the synthesizer, in volts
SYNTH_GRID_START = 2.0
SYNTH_GRID_STOP = 3.5

SAMPLE_ID_HEADER = "sample_id"


class Layout(Enum):
    """Orientation of a CSV export"""
    ROWS_ARE_SAMPLES = "rows_are_samples"
    COLUMNS_ARE_SAMPLES = "columns_are_samples"


def _readonly(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float, copy=True)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class FunctionalDataset:
    """n curves sampled over a p-point grid"""
    values: np.ndarray
    grid: np.ndarray
    sample_ids: Tuple[str, ...] = ()

    def __post_init__(self):
        values = _readonly(self.values)
        grid = _readonly(self.grid)
        if values.ndim != 2:
            raise ValidationError(f"values must be a 2-D matrix, got shape {values.shape}")
        if grid.ndim != 1 or grid.shape[0] != values.shape[1]:
            raise ValidationError(
                f"grid length {grid.shape[0] if grid.ndim == 1 else grid.shape} "
                f"does not match the {values.shape[1]} columns of values"
            )
        if not np.all(np.isfinite(grid)):
            raise ValidationError("grid contains non-finite coordinates")
        steps = np.diff(grid)
        if grid.shape[0] > 1 and not (np.all(steps > 0) or np.all(steps < 0)):
            raise ValidationError("grid is not strictly monotone")
        bad = np.argwhere(~np.isfinite(values))
        if bad.size:
            i, j = bad[0]
            raise ValidationError(f"non-finite value {values[i, j]!r} at sample {i}, column {j}")

        sample_ids = tuple(str(s) for s in self.sample_ids) or tuple(
            f"sample_{i}" for i in range(values.shape[0])
        )
        if len(sample_ids) != values.shape[0]:
            raise ValidationError(
                f"{len(sample_ids)} sample ids given for {values.shape[0]} samples"
            )
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "sample_ids", sample_ids)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape

    def is_decreasing(self) -> bool:
        return self.p > 1 and bool(self.grid[1] < self.grid[0])

    def subset(self, indices: Sequence[int]) -> "FunctionalDataset":
        """Rows at the given indices, in order"""
        indices = list(indices)
        return FunctionalDataset(
            values=self.values[indices],
            grid=self.grid,
            sample_ids=tuple(self.sample_ids[i] for i in indices),
        )


@dataclass(frozen=True)
class DatasetSummary:
    """Column statistics of a dataset, plus the response mean when one is attached"""
    column_mean: np.ndarray
    column_std: np.ndarray
    response_mean: Optional[float] = None


@dataclass(frozen=True)
class SplitSpec:
    """Index partition of a dataset into train / test1 / test2

    Outliers are dropped from every output; they may be listed inside train.
    """
    train_indices: Tuple[int, ...]
    test1_indices: Tuple[int, ...] = ()
    test2_indices: Tuple[int, ...] = ()
    outlier_indices: Tuple[int, ...] = field(default_factory=tuple)

    def validate(self, n: int) -> None:
        """Check disjointness and bounds against a dataset with n rows"""
        lists = {
            "train": self.train_indices,
            "test1": self.test1_indices,
            "test2": self.test2_indices,
            "outliers": self.outlier_indices,
        }
        for name, indices in lists.items():
            if len(set(indices)) != len(indices):
                raise ValidationError(f"split list '{name}' contains repeated indices")
            for i in indices:
                if not 0 <= i < n:
                    raise ValidationError(
                        f"split list '{name}' has index {i} outside 0..{n - 1}"
                    )
        pairs = [("train", "test1"), ("train", "test2"), ("test1", "test2"),
                 ("outliers", "test1"), ("outliers", "test2")]
        for a, b in pairs:
            overlap = sorted(set(lists[a]) & set(lists[b]))
            if overlap:
                raise ValidationError(f"split lists '{a}' and '{b}' overlap at {overlap[:5]}")


def _parse_cell(text, row: int, col: int) -> float:
    if not isinstance(text, str):
        raise ValidationError(f"missing value at row {row}, column {col} (ragged row)")
    try:
        return float(text.strip())
    except ValueError:
        raise CsvParseError(
            f"cannot parse {text!r} as a number at row {row}, column {col}", row, col
        ) from None


def _is_number(text) -> bool:
    if not isinstance(text, str) or not text.strip():
        return False
    try:
        float(text.strip())
        return True
    except ValueError:
        return False


def load_csv(path: Union[str, Path], layout: Union[Layout, str] = Layout.ROWS_ARE_SAMPLES) -> FunctionalDataset:
    """Load a functional dataset from a CSV export

    Rows-are-samples layout: the first row holds the grid coordinates, every
    following row one sample. A first column whose header cell is empty or
    non-numeric carries sample ids. Columns-are-samples is the transpose.

    Args:
        path: CSV file (UTF-8, comma separated, dot decimal separator)
        layout: orientation of the export

    Returns:
        FunctionalDataset with validated grid and values
    """
    layout = Layout(layout)
    path = Path(path)
    if not path.exists():
        raise DataError(f"CSV file not found: {path}")

    try:
        table = pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8",
            engine="python",
        )
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{path} is empty") from e
    except pd.errors.ParserError as e:
        raise ValidationError(f"ragged rows in {path}: {e}") from e
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"cannot read {path}: {e}") from e

    cells = table.to_numpy(dtype=object)
    if layout is Layout.COLUMNS_ARE_SAMPLES:
        cells = cells.T
    if cells.shape[0] < 2:
        raise ValidationError(f"{path} needs a grid header and at least one sample")

    # Positions reported to the user refer to the file as written (1-based)
    def file_pos(r: int, c: int) -> Tuple[int, int]:
        if layout is Layout.COLUMNS_ARE_SAMPLES:
            r, c = c, r
        return r + 1, c + 1

    header = cells[0]
    has_ids = not _is_number(header[0])
    first_value_col = 1 if has_ids else 0

    grid = np.array([
        _parse_cell(header[c], *file_pos(0, c)) for c in range(first_value_col, cells.shape[1])
    ])
    values = np.empty((cells.shape[0] - 1, grid.shape[0]))
    sample_ids: List[str] = []
    for r in range(1, cells.shape[0]):
        for c in range(first_value_col, cells.shape[1]):
            values[r - 1, c - first_value_col] = _parse_cell(cells[r, c], *file_pos(r, c))
        if has_ids:
            sample_ids.append(str(cells[r, 0]).strip())

    bad = np.argwhere(~np.isfinite(values))
    if bad.size:
        r, c = bad[0]
        row, col = file_pos(r + 1, c + first_value_col)
        raise ValidationError(f"non-finite value {values[r, c]!r} at row {row}, column {col}")

    dataset = FunctionalDataset(values=values, grid=grid, sample_ids=tuple(sample_ids))
    logger.info(f"[DATASET] Loaded {path.name}: n={dataset.n}, p={dataset.p}, "
                f"grid {'decreasing' if dataset.is_decreasing() else 'increasing'}")
    return dataset


def write_csv(ds: FunctionalDataset, path: Union[str, Path]) -> Path:
    """Write a dataset in the rows-are-samples dialect load_csv reads"""
    from .storage import write_dataframe

    columns = [SAMPLE_ID_HEADER] + [repr(float(g)) for g in ds.grid]
    frame = pd.DataFrame(ds.values.tolist(), columns=columns[1:])
    frame.insert(0, SAMPLE_ID_HEADER, list(ds.sample_ids))
    return write_dataframe(frame, path)


def load_split_spec(path: Union[str, Path]) -> SplitSpec:
    """Read a split sidecar: {"train": [...], "test1": [...], "test2": [...], "outliers": [...]}"""
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise DataError(f"cannot read split spec {path}: {e}") from e
    if "train" not in data:
        raise ValidationError(f"split spec {path} has no 'train' list")
    return SplitSpec(
        train_indices=tuple(int(i) for i in data["train"]),
        test1_indices=tuple(int(i) for i in data.get("test1", [])),
        test2_indices=tuple(int(i) for i in data.get("test2", [])),
        outlier_indices=tuple(int(i) for i in data.get("outliers", [])),
    )


def smooth_basis(grid: np.ndarray, rank: int, smoothness: float) -> np.ndarray:
    """rank Gaussian bumps over the grid, centers evenly spaced; shape (rank, p)"""
    lo, hi = float(np.min(grid)), float(np.max(grid))
    span = hi - lo
    centers = lo + span * (np.arange(rank) + 1.0) / (rank + 1.0)
    width = smoothness * span / (rank + 1.0)
    return np.exp(-0.5 * ((grid[None, :] - centers[:, None]) / width) ** 2)


def generate_curves(
    n: int,
    p: int,
    smoothness: float,
    rank: int,
    noise_std: float,
    seed: int,
    amplitude: float = 0.02,
) -> Tuple[FunctionalDataset, np.ndarray, np.ndarray]:
    """Synthesize smooth low-rank curves and return their building blocks

    Each row is coefficients[i] @ basis plus white noise. Coefficients are
    negative on average so curves resemble capacity-difference data.

    Returns:
        (dataset, coefficients of shape (n, rank), basis of shape (rank, p))
    """
    if n < 1 or p < 1:
        raise ArgumentError(f"n and p must be positive, got n={n}, p={p}")
    if rank < 1 or rank > min(n, p):
        raise ArgumentError(f"rank must be in 1..min(n, p)={min(n, p)}, got {rank}")
    if smoothness <= 0:
        raise ArgumentError(f"smoothness must be positive, got {smoothness}")
    if noise_std < 0:
        raise ArgumentError(f"noise_std must be non-negative, got {noise_std}")

    rng = np.random.default_rng(seed)
    grid = np.linspace(SYNTH_GRID_START, SYNTH_GRID_STOP, p)
    basis = smooth_basis(grid, rank, smoothness)
    coefficients = -amplitude * (1.0 + 0.5 * rng.standard_normal((n, rank)))
    noise = noise_std * rng.standard_normal((n, p))
    values = coefficients @ basis + noise

    dataset = FunctionalDataset(
        values=values,
        grid=grid,
        sample_ids=tuple(f"synth_{i}" for i in range(n)),
    )
    logger.debug(f"[DATASET] Synthesized n={n}, p={p}, rank={rank}, noise_std={noise_std}, seed={seed}")
    return dataset, coefficients, basis


def synthesize(
    n: int,
    p: int,
    smoothness: float = 1.0,
    rank: int = 5,
    noise_std: float = 1e-4,
    seed: int = 0,
) -> FunctionalDataset:
    """Deterministic smooth low-rank curves on a uniform [2.0, 3.5] grid"""
    dataset, _, _ = generate_curves(n, p, smoothness, rank, noise_std, seed)
    return dataset


def summarize(ds: FunctionalDataset, y: Optional[Sequence[float]] = None) -> DatasetSummary:
    """Column means and (population) standard deviations"""
    column_mean = ds.values.mean(axis=0)
    column_std = np.sqrt(np.mean((ds.values - column_mean) ** 2, axis=0))
    response_mean = None
    if y is not None:
        y = np.asarray(y, dtype=float)
        if y.shape != (ds.n,):
            raise ArgumentError(f"response has shape {y.shape}, expected ({ds.n},)")
        response_mean = float(y.mean())
    return DatasetSummary(
        column_mean=_readonly(column_mean),
        column_std=_readonly(column_std),
        response_mean=response_mean,
    )


def center(ds: FunctionalDataset) -> Tuple[np.ndarray, DatasetSummary]:
    """Subtract the column means: X - 1 x̄ᵀ"""
    if ds.n < 2:
        raise ArgumentError(f"centering needs at least 2 samples, got {ds.n}")
    summary = summarize(ds)
    centered = ds.values - summary.column_mean
    return centered, summary


def standardize(ds: FunctionalDataset) -> FunctionalDataset:
    """Z-score every column; constant columns are only centered

    Off by default in every pipeline.
    """
    centered, summary = center(ds)
    scale = np.where(summary.column_std > 0, summary.column_std, 1.0)
    return FunctionalDataset(values=centered / scale, grid=ds.grid, sample_ids=ds.sample_ids)


def apply_split(
    ds: FunctionalDataset, spec: SplitSpec
) -> Tuple[FunctionalDataset, FunctionalDataset, FunctionalDataset]:
    """Cut a dataset into (train, test1, test2), dropping outliers"""
    spec.validate(ds.n)
    outliers = set(spec.outlier_indices)
    train = [i for i in spec.train_indices if i not in outliers]
    parts = (
        ds.subset(train),
        ds.subset(spec.test1_indices),
        ds.subset(spec.test2_indices),
    )
    logger.info(f"[DATASET] Split {ds.n} samples into train={parts[0].n}, "
                f"test1={parts[1].n}, test2={parts[2].n} ({len(outliers)} outliers removed)")
    return parts
