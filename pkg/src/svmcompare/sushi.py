"""Sushi preference survey: file parsing and pair construction.

Expects the standard distribution files ``sushi3.idata`` (item
attributes), ``sushi3.udata`` (respondent attributes) and
``sushi3b.5000.10.score`` (score matrix, -1 for unrated, ten ratings
per respondent).  Respondent birthplace and current prefecture codes
are geocoded to capital-city latitude/longitude through a bundled
table; code 47 ("overseas") maps to the geographic center of Japan.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from importlib.resources import files
from pathlib import Path

import numpy as np

from .pairs import PairDataset

ITEM_FILE = "sushi3.idata"
USER_FILE = "sushi3.udata"
SCORE_FILE = "sushi3b.5000.10.score"
RATINGS_PER_USER = 10
ENV_VAR = "SUSHI3_DIR"


@dataclass(frozen=True)
class SushiTables:
    """Parsed survey tables; scores use -1 for unrated cells."""

    item_features: np.ndarray
    user_features: np.ndarray
    scores: np.ndarray

    @property
    def n_items(self) -> int:
        return self.item_features.shape[0]

    @property
    def n_users(self) -> int:
        return self.user_features.shape[0]


@lru_cache(maxsize=1)
def prefecture_coords() -> np.ndarray:
    """(48, 2) latitude/longitude table indexed by prefecture code."""
    text = files("svmcompare").joinpath("data/prefectures.csv").read_text()
    rows = []
    for line in text.strip().splitlines()[1:]:
        code, _name, lat, lon = line.split(",")
        assert int(code) == len(rows)
        rows.append((float(lat), float(lon)))
    out = np.asarray(rows, dtype=np.float64)
    out.setflags(write=False)
    return out


def _parse_items(path: Path) -> np.ndarray:
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 9:
                raise ValueError(
                    f"{path}: line {lineno}: expected 9 fields, got {len(parts)}"
                )
            try:
                idx = int(parts[0])
                feats = [float(v) for v in parts[2:9]]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparseable value") from None
            if idx != len(rows):
                raise ValueError(f"{path}: line {lineno}: item id {idx} out of order")
            rows.append(feats)
    if not rows:
        raise ValueError(f"{path}: no items")
    return np.asarray(rows, dtype=np.float64)


def _parse_users(path: Path) -> np.ndarray:
    coords = prefecture_coords()
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != 11:
                raise ValueError(
                    f"{path}: line {lineno}: expected 11 fields, got {len(parts)}"
                )
            try:
                vals = [int(v) for v in parts]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparseable value") from None
            if vals[0] != len(rows):
                raise ValueError(f"{path}: line {lineno}: user id {vals[0]} out of order")
            feats = [float(vals[1]), float(vals[2]), float(vals[3])]
            for code in (vals[4], vals[7]):
                if not 0 <= code < coords.shape[0]:
                    raise ValueError(
                        f"{path}: line {lineno}: unknown prefecture code {code}"
                    )
                feats.extend(coords[code])
            rows.append(feats)
    if not rows:
        raise ValueError(f"{path}: no users")
    return np.asarray(rows, dtype=np.float64)


def _parse_scores(path: Path, n_items: int) -> np.ndarray:
    rows: list[list[int]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != n_items:
                raise ValueError(
                    f"{path}: line {lineno}: expected {n_items} scores, got {len(parts)}"
                )
            try:
                vals = [int(v) for v in parts]
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: unparseable value") from None
            bad = [v for v in vals if v not in (-1, 0, 1, 2, 3, 4)]
            if bad:
                raise ValueError(f"{path}: line {lineno}: invalid score {bad[0]}")
            rated = sum(1 for v in vals if v >= 0)
            if rated != RATINGS_PER_USER:
                raise ValueError(
                    f"{path}: user {len(rows)} has {rated} ratings, "
                    f"expected {RATINGS_PER_USER}"
                )
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no score rows")
    return np.asarray(rows, dtype=np.int64)


def parse_sushi_tables(directory) -> SushiTables:
    """Load and cross-validate the three survey files from a directory."""
    directory = Path(directory)
    for name in (ITEM_FILE, USER_FILE, SCORE_FILE):
        if not (directory / name).is_file():
            raise FileNotFoundError(f"missing dataset file: {directory / name}")
    items = _parse_items(directory / ITEM_FILE)
    users = _parse_users(directory / USER_FILE)
    scores = _parse_scores(directory / SCORE_FILE, items.shape[0])
    if scores.shape[0] != users.shape[0]:
        raise ValueError(
            f"{directory}: {users.shape[0]} users but {scores.shape[0]} score rows"
        )
    return SushiTables(items, users, scores)


def build_pairs(tables: SushiTables, seed=0) -> PairDataset:
    """Disjointly pair each user's ten rated items into five labeled pairs.

    Features concatenate the item attributes with the respondent
    attributes (dimension 7 + 7); the label is the sign of the score
    difference, 0 when the two scores agree.
    """
    rng = np.random.default_rng(seed)
    xs, xps, ys = [], [], []
    for u in range(tables.n_users):
        rated = np.flatnonzero(tables.scores[u] >= 0)
        perm = rng.permutation(rated.size)
        for k in range(rated.size // 2):
            ia = rated[perm[2 * k]]
            ib = rated[perm[2 * k + 1]]
            xs.append(np.concatenate([tables.item_features[ia], tables.user_features[u]]))
            xps.append(np.concatenate([tables.item_features[ib], tables.user_features[u]]))
            ys.append(int(np.sign(tables.scores[u, ib] - tables.scores[u, ia])))
    return PairDataset(np.vstack(xs), np.vstack(xps), np.array(ys, dtype=np.int64))


def find_dataset() -> Path | None:
    """Locate a sushi3 directory via $SUSHI3_DIR, then common locations."""
    candidates = []
    env = os.environ.get(ENV_VAR)
    if env:
        candidates.append(Path(env))
    candidates += [Path("sushi3"), Path.home() / "sushi3", Path("/usr/share/sushi3")]
    for cand in candidates:
        if all((cand / name).is_file() for name in (ITEM_FILE, USER_FILE, SCORE_FILE)):
            return cand
    return None
