"""Bit-exact file formats: WADE v1 embeddings, CSV label sidecar, checkpoints.

WADE v1 layout (little-endian throughout):

    magic   4 bytes  b"WADE"
    version u32      1
    count   u64      number of embeddings
    dim     u32      embedding dimension
    dtype   u8       0 = float32
    payload count * dim * 4 bytes, row-major float32

The sidecar is a plain CSV with header `index,role,label,ground_truth,
is_target`, one row per instance, indices dense 0..count-1 in order.
Ground truth and target flags are parsed only by `read_hidden_truth`;
`read_labels` (the training-path surface) never returns them.

Checkpoints ("WADC" magic) store the architecture header followed by the
layer weights and biases as float64; optimizer state is not persisted.
"""

from __future__ import annotations

import csv
import logging
import struct
from pathlib import Path

import numpy as np

from .dataset import DatasetState
from .errors import (
    BadMagic,
    FormatError,
    IndexGap,
    MalformedRow,
    NonUnitEmbedding,
    RowCountMismatch,
    TruncatedPayload,
    UnsupportedVersion,
)
from .student import StudentParams

logger = logging.getLogger("wad.io")

_WADE_MAGIC = b"WADE"
_WADC_MAGIC = b"WADC"
_WADE_HEADER = struct.Struct("<4sIQIB")
_ROLES = ("labeled", "unlabeled", "test")

# Norm drift up to RENORM_TOL is accepted silently (float32 storage);
# beyond it we re-normalize with a warning; beyond HARD_TOL we refuse.
RENORM_TOL = 1e-6
HARD_TOL = 1e-4


def write_embeddings(path: str | Path, embeddings: np.ndarray) -> None:
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] == 0:
        raise FormatError(f"expected non-empty (n, d) array, got shape {emb.shape}")
    header = _WADE_HEADER.pack(_WADE_MAGIC, 1, emb.shape[0], emb.shape[1], 0)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(emb, dtype="<f4").tobytes())


def read_embeddings(path: str | Path) -> np.ndarray:
    """Load and validate a WADE v1 file; returns float64 unit rows."""
    raw = Path(path).read_bytes()
    if len(raw) < _WADE_HEADER.size:
        raise TruncatedPayload(f"{path}: file shorter than header")
    magic, version, count, dim, dtype = _WADE_HEADER.unpack_from(raw)
    if magic != _WADE_MAGIC:
        raise BadMagic(f"{path}: magic {magic!r}")
    if version != 1:
        raise UnsupportedVersion(f"{path}: version {version}")
    if dtype != 0:
        raise UnsupportedVersion(f"{path}: dtype code {dtype}")
    expected = count * dim * 4
    payload = raw[_WADE_HEADER.size:]
    if len(payload) < expected:
        raise TruncatedPayload(
            f"{path}: payload {len(payload)} bytes, header implies {expected}"
        )
    if len(payload) > expected:
        raise FormatError(f"{path}: {len(payload) - expected} trailing bytes")
    emb = (
        np.frombuffer(payload, dtype="<f4")
        .reshape(count, dim)
        .astype(np.float64)
    )
    err = np.abs(np.linalg.norm(emb, axis=1) - 1.0)
    worst = float(err.max())
    if worst > HARD_TOL:
        raise NonUnitEmbedding(
            f"{path}: row {int(err.argmax())} norm deviates by {worst:.2e}"
        )
    if worst > RENORM_TOL:
        drifted = err > RENORM_TOL
        logger.warning(
            "%s: re-normalizing %d rows with norm drift up to %.2e",
            path,
            int(drifted.sum()),
            worst,
        )
        emb[drifted] /= np.linalg.norm(emb[drifted], axis=1)[:, None]
    return emb


def write_labels(
    path: str | Path,
    roles: np.ndarray,
    labels: np.ndarray,
    ground_truth: np.ndarray | None = None,
    is_target: np.ndarray | None = None,
) -> None:
    n = len(roles)
    gt = np.full(n, -1, dtype=np.int64) if ground_truth is None else ground_truth
    flags = np.full(n, -1, dtype=np.int64) if is_target is None else is_target
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "role", "label", "ground_truth", "is_target"])
        for i in range(n):
            writer.writerow([i, roles[i], int(labels[i]), int(gt[i]), int(flags[i])])


def _parse_sidecar(path: str | Path, expected_count: int) -> dict[str, np.ndarray]:
    roles, labels, gts, flags = [], [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow(f"{path}: empty file, header row required") from None
        if [h.strip() for h in header] != [
            "index",
            "role",
            "label",
            "ground_truth",
            "is_target",
        ]:
            raise MalformedRow(f"{path}: line 1: unexpected header {header}")
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 5:
                raise MalformedRow(f"{path}: line {lineno}: expected 5 fields")
            try:
                index = int(row[0])
                label = int(row[2])
                gt = int(row[3])
                flag = int(row[4])
            except ValueError as exc:
                raise MalformedRow(f"{path}: line {lineno}: {exc}") from None
            role = row[1].strip()
            if role not in _ROLES:
                raise MalformedRow(f"{path}: line {lineno}: unknown role {role!r}")
            if index != len(roles):
                raise IndexGap(
                    f"{path}: line {lineno}: index {index}, expected {len(roles)}"
                )
            if role == "labeled" and label < 0:
                raise MalformedRow(
                    f"{path}: line {lineno}: labeled row needs label >= 0"
                )
            if role == "unlabeled" and label != -1:
                raise MalformedRow(
                    f"{path}: line {lineno}: unlabeled row must carry label -1"
                )
            if flag not in (-1, 0, 1):
                raise MalformedRow(
                    f"{path}: line {lineno}: is_target must be -1, 0 or 1"
                )
            roles.append(role)
            labels.append(label)
            gts.append(gt)
            flags.append(flag)
    if len(roles) != expected_count:
        raise RowCountMismatch(
            f"{path}: {len(roles)} rows, embedding file has {expected_count}"
        )
    return {
        "roles": np.asarray(roles, dtype=object),
        "labels": np.asarray(labels, dtype=np.int64),
        "ground_truth": np.asarray(gts, dtype=np.int64),
        "is_target": np.asarray(flags, dtype=np.int64),
    }


def read_labels(
    path: str | Path, expected_count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Training-path surface: (roles, labels) only; hidden columns withheld."""
    parsed = _parse_sidecar(path, expected_count)
    return parsed["roles"], parsed["labels"]


def read_hidden_truth(
    path: str | Path, expected_count: int
) -> tuple[np.ndarray, np.ndarray]:
    """Diagnostics-only surface: (ground_truth, is_target), -1 = unavailable."""
    parsed = _parse_sidecar(path, expected_count)
    return parsed["ground_truth"], parsed["is_target"].astype(np.int8)


# --- DatasetState bridging ---

def save_dataset(
    state: DatasetState, embeddings_path: str | Path, sidecar_path: str | Path
) -> None:
    write_embeddings(embeddings_path, state.embeddings)
    roles = np.empty(state.n_instances, dtype=object)
    roles[state.labeled_idx] = "labeled"
    roles[state.unlabeled_idx] = "unlabeled"
    roles[state.test_idx] = "test"
    write_labels(
        sidecar_path,
        roles,
        state.visible_labels,
        state.ground_truth,
        state.is_target,
    )


def load_dataset(
    embeddings_path: str | Path,
    sidecar_path: str | Path,
    with_hidden: bool = True,
) -> DatasetState:
    """Assemble a DatasetState from a WADE file plus sidecar.

    with_hidden=False drops ground truth entirely (pure training view).
    """
    emb = read_embeddings(embeddings_path)
    roles, labels = read_labels(sidecar_path, emb.shape[0])
    labeled_idx = np.flatnonzero(roles == "labeled")
    test_idx = np.flatnonzero(roles == "test")
    known = labels[np.concatenate([labeled_idx, test_idx])]
    k_target = int(known.max()) + 1 if len(known) else 0
    ground_truth = is_target = None
    if with_hidden:
        gt, flags = read_hidden_truth(sidecar_path, emb.shape[0])
        if np.any(gt >= 0) or np.any(flags >= 0):
            ground_truth, is_target = gt, flags
    return DatasetState(
        embeddings=emb,
        k_target=k_target,
        labeled_idx=labeled_idx,
        unlabeled_idx=np.flatnonzero(roles == "unlabeled"),
        test_idx=test_idx,
        visible_labels=labels,
        ground_truth=ground_truth,
        is_target=is_target,
    )


# --- student checkpoints ---

def save_checkpoint(path: str | Path, params: StudentParams) -> None:
    sizes = [params.input_dim] + [int(w.shape[0]) for w in params.weights]
    act_code = 0 if params.activation == "relu" else 1
    with open(path, "wb") as fh:
        fh.write(_WADC_MAGIC)
        fh.write(struct.pack("<IBI", 1, act_code, len(sizes)))
        fh.write(struct.pack(f"<{len(sizes)}I", *sizes))
        for w, b in zip(params.weights, params.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_checkpoint(path: str | Path) -> StudentParams:
    raw = Path(path).read_bytes()
    if raw[:4] != _WADC_MAGIC:
        raise BadMagic(f"{path}: magic {raw[:4]!r}")
    version, act_code, n_sizes = struct.unpack_from("<IBI", raw, 4)
    if version != 1:
        raise UnsupportedVersion(f"{path}: version {version}")
    offset = 4 + struct.calcsize("<IBI")
    sizes = struct.unpack_from(f"<{n_sizes}I", raw, offset)
    offset += 4 * n_sizes
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        w_bytes = fan_out * fan_in * 8
        b_bytes = fan_out * 8
        if offset + w_bytes + b_bytes > len(raw):
            raise TruncatedPayload(f"{path}: parameter payload too short")
        weights.append(
            np.frombuffer(raw, dtype="<f8", count=fan_out * fan_in, offset=offset)
            .reshape(fan_out, fan_in)
            .astype(np.float64)
        )
        offset += w_bytes
        biases.append(
            np.frombuffer(raw, dtype="<f8", count=fan_out, offset=offset).astype(
                np.float64
            )
        )
        offset += b_bytes
    if offset != len(raw):
        raise FormatError(f"{path}: {len(raw) - offset} trailing bytes")
    return StudentParams(
        weights=weights,
        biases=biases,
        activation="relu" if act_code == 0 else "tanh",
    )
