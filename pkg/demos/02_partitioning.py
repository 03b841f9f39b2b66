"""Compare an IID client partition with a label-sharded one.

IID deals a random near-equal share of everything to each client.  Sharding
sorts each class into single-label shards and deals k shards per client, so
every client ends up holding at most k distinct labels.  That is the knob
for label skew: smaller k, more skew.  Run:

    python3 demos/02_partitioning.py
"""

import numpy as np

from fedsim import (
    Dataset,
    generate_synthetic,
    label_distribution,
    partition_iid,
    partition_shards,
)


def print_label_table(data: Dataset, splits, title: str) -> None:
    print(title)
    header = "  client " + "".join(f"  label{c}" for c in range(data.n_classes))
    print(header + "  distinct")
    for split in splits:
        counts = label_distribution(data, split)
        row = f"  {split.client_id:>6} " + "".join(f"  {c:>6}" for c in counts)
        print(row + f"  {int((counts > 0).sum()):>8}")


def main() -> None:
    data = generate_synthetic(
        n_samples=1600, n_classes=4, feature_dim=16, separation=6.0, seed=0
    )

    iid = partition_iid(data, n_clients=8, seed=0)
    print_label_table(data, iid, "iid partition, 8 clients:")

    # Every client sees every label at roughly the global proportions.
    sizes = [s.n_samples for s in iid]
    print(f"  sizes: {sizes} (differ by at most one)\n")

    sharded = partition_shards(data, n_clients=8, shards_per_client=2, seed=0)
    print_label_table(data, sharded, "shards(2) partition, 8 clients:")

    # Shards are disjoint and exhaustive: together the clients hold exactly
    # the original index set.
    all_idx = np.sort(np.concatenate([s.indices for s in sharded]))
    print("  disjoint and exhaustive:",
          np.array_equal(all_idx, np.arange(data.n_samples)))

    # One shard per client is the most extreme skew: single-label clients.
    single = partition_shards(data, n_clients=4, shards_per_client=1, seed=0)
    print("\nshards(1) partition, 4 clients:")
    for split in single:
        labels = np.unique(data.labels[split.indices])
        print(f"  client {split.client_id}: {split.n_samples} samples, "
              f"labels {labels.tolist()}")


if __name__ == "__main__":
    main()
