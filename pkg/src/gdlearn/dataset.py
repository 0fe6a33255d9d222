"""Synthetic manifold samplers and CSV readers/writers for point clouds."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ParameterError
from .fields import DistanceField

FLOAT_FMT = "{:.17g}"


@dataclass(frozen=True)
class PointCloud:
    """``n`` points in ``m``-dimensional ambient space, one per row."""

    points: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ParameterError(
                f"point cloud must be a non-empty 2-D array, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ParameterError("point cloud has non-finite entries")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def m(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class LabeledPointCloud:
    """Point cloud with an integer category per point.

    ``intrinsic`` optionally carries the 2-D pre-image coordinates the
    sampler used before embedding.
    """

    cloud: PointCloud
    labels: np.ndarray
    intrinsic: np.ndarray | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.shape != (self.cloud.n,):
            raise ParameterError("labels must have one entry per point")
        if not np.issubdtype(labels.dtype, np.integer):
            raise ParameterError("labels must be integers")
        object.__setattr__(self, "labels", labels)


def _check_count(name, value):
    if int(value) != value or value < 1:
        raise ParameterError(f"{name} must be a positive integer, got {value}")


def sample_torus(n, R=2.0, r=0.8, seed=0):
    """Sample ``n`` points on a torus with uniformly drawn angles.

    Parameters
    ----------
    n : int
        Number of points.
    R, r : float
        Major and minor radius, ``0 < r < R``.
    seed : int
        Seed for ``numpy.random.default_rng``.
    """
    _check_count("n", n)
    if not 0 < r < R:
        raise ParameterError(f"torus radii must satisfy 0 < r < R, got R={R}, r={r}")
    rng = np.random.default_rng(seed)
    u = rng.uniform(0.0, 2 * np.pi, n)
    v = rng.uniform(0.0, 2 * np.pi, n)
    ring = R + r * np.cos(u)
    pts = np.column_stack([ring * np.cos(v), ring * np.sin(v), r * np.sin(u)])
    return PointCloud(pts)


def sample_sphere(n, radius=1.0, seed=0):
    """Uniform sample of the sphere of the given radius in 3-D."""
    _check_count("n", n)
    if radius <= 0:
        raise ParameterError(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, 3))
    norms = np.linalg.norm(g, axis=1)
    # a zero Gaussian draw has probability zero; redraw defensively anyway
    while np.any(norms == 0):
        bad = norms == 0
        g[bad] = rng.standard_normal((bad.sum(), 3))
        norms = np.linalg.norm(g, axis=1)
    return PointCloud(radius * g / norms[:, None])


def sample_plane_grid(side, seed=None):
    """Uniform ``side x side`` lattice on the unit square, embedded at ``z = 0``.

    The lattice is deterministic; ``seed`` is accepted so every sampler
    shares one calling convention.
    """
    _check_count("side", side)
    ticks = np.linspace(0.0, 1.0, side)
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    return PointCloud(np.column_stack([gx.ravel(), gy.ravel(), np.zeros(side * side)]))


def _roll_arclength(theta):
    # arc length of the spiral (theta cos theta, theta sin theta) from 0
    return 0.5 * (theta * np.sqrt(1.0 + theta ** 2) + np.arcsinh(theta))


def sample_swiss_roll_clusters(n, cluster_count=3, seed=0, theta_range=(1.5 * np.pi, 4.5 * np.pi),
                               height_sigma=3.0):
    """Gaussian blobs on an unrolled strip, rolled into a 3-D swiss roll.

    Cluster centers are spaced evenly along the arc length of the roll; the
    blob spread along the arc is a quarter of that spacing so neighboring
    blobs touch and the sample stays connected. Labels are blob ids.

    Returns
    -------
    LabeledPointCloud
        With ``intrinsic`` set to the ``(arc_length, height)`` pre-images.
    """
    _check_count("n", n)
    _check_count("cluster_count", cluster_count)
    lo, hi = theta_range
    if not 0 <= lo < hi:
        raise ParameterError("theta_range must be increasing and non-negative")
    if height_sigma <= 0:
        raise ParameterError("height_sigma must be positive")
    rng = np.random.default_rng(seed)
    s_lo, s_hi = _roll_arclength(lo), _roll_arclength(hi)
    spacing = (s_hi - s_lo) / cluster_count
    centers = s_lo + spacing * (np.arange(cluster_count) + 0.5)
    labels = np.arange(n) % cluster_count
    s = rng.normal(centers[labels], spacing / 4.0)
    s = np.clip(s, s_lo, s_hi)
    h = rng.normal(0.0, height_sigma, n)

    table = np.linspace(lo, hi, 20001)
    theta = np.interp(s, _roll_arclength(table), table)
    pts = np.column_stack([theta * np.cos(theta), h, theta * np.sin(theta)])
    return LabeledPointCloud(PointCloud(pts), labels.astype(np.int64), np.column_stack([s, h]))


# --- CSV I/O -------------------------------------------------------------

def _read_rows(path):
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FormatError(f"{path} is empty")
    return rows


def _parse_float(token, line):
    try:
        value = float(token)
    except ValueError:
        raise FormatError(f"non-numeric token {token!r}", line) from None
    if not np.isfinite(value):
        raise FormatError(f"non-finite value {token!r}", line)
    return value


def _write_rows(path, header, rows):
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def save_points(cloud, path):
    """Write ``cloud`` as CSV with header ``x0,...,x{m-1}``."""
    header = [f"x{c}" for c in range(cloud.m)]
    _write_rows(path, header, ([FLOAT_FMT.format(v) for v in row] for row in cloud.points))


def load_points(path):
    rows = _read_rows(path)
    header = rows[0]
    m = len(header)
    if [h.strip() for h in header] != [f"x{c}" for c in range(m)]:
        raise FormatError(f"expected header x0,...,x{m - 1}, got {','.join(header)}", 1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != m:
            raise FormatError(f"expected {m} columns, found {len(row)}", lineno)
        data.append([_parse_float(tok, lineno) for tok in row])
    if not data:
        raise FormatError(f"{path} has a header but no points")
    return PointCloud(np.array(data))


def save_scalar_field(field, path):
    """Write a scalar field as CSV rows ``index,value``."""
    _write_rows(path, ["index", "value"],
                ([str(i), FLOAT_FMT.format(v)] for i, v in enumerate(field.values)))


def load_scalar_field(path, query=None):
    """Read an ``index,value`` CSV.

    When ``query`` is omitted it is taken as the first index whose value is
    exactly zero, or left ``None`` if no such index exists.
    """
    rows = _read_rows(path)
    if [h.strip() for h in rows[0]] != ["index", "value"]:
        raise FormatError("expected header index,value", 1)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise FormatError(f"expected 2 columns, found {len(row)}", lineno)
        try:
            idx = int(row[0])
        except ValueError:
            raise FormatError(f"non-integer index {row[0]!r}", lineno) from None
        if idx != len(values):
            raise FormatError(f"expected index {len(values)}, found {idx}", lineno)
        values.append(_parse_float(row[1], lineno))
    if not values:
        raise FormatError(f"{path} has a header but no values")
    values = np.array(values)
    if query is None:
        zeros = np.flatnonzero(values == 0.0)
        query = int(zeros[0]) if zeros.size else None
    return DistanceField(values, query)


def save_labels(labels, path):
    _write_rows(path, ["index", "label"], ([str(i), str(int(v))] for i, v in enumerate(labels)))


def load_labels(path):
    rows = _read_rows(path)
    if [h.strip() for h in rows[0]] != ["index", "label"]:
        raise FormatError("expected header index,label", 1)
    labels = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise FormatError(f"expected 2 columns, found {len(row)}", lineno)
        try:
            idx, lab = int(row[0]), int(row[1])
        except ValueError:
            raise FormatError("index and label must be integers", lineno) from None
        if idx != len(labels):
            raise FormatError(f"expected index {len(labels)}, found {idx}", lineno)
        labels.append(lab)
    if not labels:
        raise FormatError(f"{path} has a header but no labels")
    return np.array(labels, dtype=np.int64)


def save_distance_matrix(values, queries, path):
    """Write an ``n x len(queries)`` matrix; column headers are ``q<index>``."""
    values = np.asarray(values)
    header = ["index"] + [f"q{int(q)}" for q in queries]
    _write_rows(path, header,
                ([str(i)] + [FLOAT_FMT.format(v) for v in row] for i, row in enumerate(values)))


def load_distance_matrix(path):
    """Inverse of :func:`save_distance_matrix`; returns ``(values, queries)``."""
    rows = _read_rows(path)
    header = [h.strip() for h in rows[0]]
    if header[0] != "index" or not all(h.startswith("q") for h in header[1:]):
        raise FormatError("expected header index,q<i>,...", 1)
    try:
        queries = [int(h[1:]) for h in header[1:]]
    except ValueError:
        raise FormatError("malformed query column name", 1) from None
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise FormatError(f"expected {len(header)} columns, found {len(row)}", lineno)
        data.append([_parse_float(tok, lineno) for tok in row[1:]])
    return np.array(data), queries


def save_vector_stage(field, frames, path):
    """Write tangent coordinates plus ambient lift ``T_i v_i`` per point."""
    d, m = field.d, frames.m
    header = ["index"] + [f"v{c}" for c in range(d)] + [f"a{c}" for c in range(m)]
    lifted = field.lift(frames)
    _write_rows(path, header,
                ([str(i)] + [FLOAT_FMT.format(v) for v in np.concatenate([vi, ai])]
                 for i, (vi, ai) in enumerate(zip(field.blocks(), lifted))))


def save_frames(frames, path):
    """Write each tangent frame flattened column by column, ``t{col}_{row}``."""
    header = ["index"] + [f"t{c}_{r}" for c in range(frames.d) for r in range(frames.m)]
    flat = frames.frames.transpose(0, 2, 1).reshape(frames.n, -1)
    _write_rows(path, header,
                ([str(i)] + [FLOAT_FMT.format(v) for v in row] for i, row in enumerate(flat)))
