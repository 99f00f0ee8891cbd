"""Table output shared by the experiment scripts."""
import csv
import json
import pathlib

import numpy as np


def _plain(x):
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_table(rows, path, meta=None):
    """Write ``rows`` (list of dicts) as CSV or JSON depending on the suffix."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [{k: _plain(v) for k, v in r.items()} for r in rows]
    if path.suffix == ".json":
        path.write_text(json.dumps({"meta": meta or {}, "rows": rows}, indent=2, sort_keys=True) + "\n")
    else:
        with path.open("w", newline="") as fh:
            fields = list(dict.fromkeys(k for r in rows for k in r))
            writer = csv.DictWriter(fh, fieldnames=fields, restval="")
            writer.writeheader()
            writer.writerows(rows)
        if meta:
            path.with_name(path.name + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(rows)} rows to {path}")
