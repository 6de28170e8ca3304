#!/usr/bin/env python3
"""Write a synthetic task suite as JSON files for the eval subcommand.

    python scripts/gen_tasks.py out_dir --planted 20 --noise 5 --seed 3
    symgrid eval out_dir --passes 1
"""

import argparse
from pathlib import Path

from symgrid import serialize_task
from symgrid.patterns import format_pattern
from symgrid.taskgen import generate_suite


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir")
    parser.add_argument("--planted", type=int, default=20)
    parser.add_argument("--noise", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = []
    for task_id, task, planted in generate_suite(args.seed, args.planted, args.noise):
        (out / f"{task_id}.json").write_bytes(serialize_task(task))
        manifest.append(
            f"{task_id}\t{format_pattern(planted) if planted else 'noise'}"
        )
    (out / "MANIFEST.tsv").write_text("\n".join(manifest) + "\n")
    print(f"wrote {len(manifest)} tasks to {out}")


if __name__ == "__main__":
    main()
