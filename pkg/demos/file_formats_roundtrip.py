"""Exercise every file format end to end in a temporary directory:
embedding file + label sidecar round-trip, the training-path loader that
withholds ground truth, and a student checkpoint reload.
"""

import tempfile
from pathlib import Path

import numpy as np

from wad import ScenarioConfig, forward, generate, init_student
from wad.io_ingest import (
    load_checkpoint,
    load_dataset,
    read_embeddings,
    read_labels,
    save_checkpoint,
    save_dataset,
)

state = generate(
    ScenarioConfig(
        k_target=2, k_unknown=2, dim=8, labeled_per_class=4,
        n_unlabeled=30, mismatch_proportion=0.5, n_test_per_class=5, seed=0,
    )
)

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    emb_path, csv_path = tmp / "demo.wade", tmp / "demo.csv"
    save_dataset(state, emb_path, csv_path)
    print(f"embedding file: {emb_path.stat().st_size} bytes "
          f"({state.n_instances} x {state.dim} float32 + 21-byte header)")

    emb = read_embeddings(emb_path)
    print(f"re-read embeddings, max |norm - 1| = "
          f"{np.max(np.abs(np.linalg.norm(emb, axis=1) - 1)):.2e}")

    roles, labels = read_labels(csv_path, state.n_instances)
    print(f"training-path loader returns roles and labels only: "
          f"{sorted(set(roles))}, labels for unlabeled rows are "
          f"{set(labels[roles == 'unlabeled'].tolist())}")

    again = load_dataset(emb_path, csv_path)
    print(f"full round-trip: k_target={again.k_target}, "
          f"splits {len(again.labeled_idx)}/{len(again.unlabeled_idx)}/"
          f"{len(again.test_idx)} preserved")

    params = init_student(8, (16,), 2, "relu", np.random.default_rng(0))
    ckpt = tmp / "student.wadc"
    save_checkpoint(ckpt, params)
    reloaded = load_checkpoint(ckpt)
    x = state.embeddings[:5]
    print(f"checkpoint reload: predictions identical = "
          f"{bool(np.array_equal(forward(params, x), forward(reloaded, x)))}")
