"""Text formats: ranking TSV + JSON sidecar, activity tables, trust statements, generic TSV tables."""
from __future__ import annotations

import json
from collections import Counter

import numpy as np

from .rank import ActivityTable, TrustStatements, ranking


def ranking_tsv(rv, labels):
    """"label<TAB>score<TAB>rank" lines sorted by rank (1-based)."""
    scores = np.asarray(rv.scores if hasattr(rv, "scores") else rv, dtype=np.float64)
    lines = []
    for r, i in enumerate(ranking(scores), 1):
        lines.append(f"{labels[i]}\t{float(scores[i])!r}\t{r}\n")
    return "".join(lines)


def sidecar_dict(rv, **extra):
    d = {
        "method": rv.method,
        "params": {k: _jsonable(v) for k, v in rv.params.items()},
        "iterations": int(rv.iterations),
        "converged": bool(rv.converged),
    }
    d.update({k: _jsonable(v) for k, v in extra.items()})
    return d


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and v != v:
        return None
    return v


def write_text(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_json(path, obj):
    write_text(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def write_ranking(path, rv, labels, **extra):
    """Write the ranking TSV and ``<path>.json`` sidecar."""
    write_text(path, ranking_tsv(rv, labels))
    write_json(str(path) + ".json", sidecar_dict(rv, **extra))


def read_ranking(path):
    """Return (labels best-first, scores) from a ranking TSV."""
    labels, scores = [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}: line {lineno}: expected label and score")
            labels.append(parts[0])
            scores.append(float(parts[1]))
    return labels, np.asarray(scores)


def read_scores_by_label(path):
    labels, scores = read_ranking(path)
    return dict(zip(labels, scores))


def _iter_rows(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            yield lineno, line.split()


def read_activity(path, label_to_id, pairs_path=None):
    """Wide table "label c1 c2 ..." with a header row naming counters, plus an optional pair
    file "commenter author count" for per-pair comments. Unknown labels are ignored."""
    counters = {}
    header = None
    for lineno, parts in _iter_rows(path):
        if header is None:
            header = parts[1:]
            for h in header:
                counters[h] = {}
            continue
        if len(parts) != len(header) + 1:
            raise ValueError(f"{path}: line {lineno}: expected {len(header) + 1} fields")
        i = label_to_id.get(parts[0])
        if i is None:
            continue
        for h, v in zip(header, parts[1:]):
            counters[h][i] = float(v)
    pairs = None
    if pairs_path is not None:
        pairs = Counter()
        for lineno, parts in _iter_rows(pairs_path):
            if len(parts) != 3:
                raise ValueError(f"{pairs_path}: line {lineno}: expected 3 fields")
            j, i = label_to_id.get(parts[0]), label_to_id.get(parts[1])
            if j is not None and i is not None:
                pairs[(j, i)] += float(parts[2])
    return ActivityTable(counters, pairs)


def read_trust(path, label_to_id):
    """"truster trustee count" lines; repeated pairs accumulate."""
    counts = Counter()
    for lineno, parts in _iter_rows(path):
        if len(parts) not in (2, 3):
            raise ValueError(f"{path}: line {lineno}: expected truster, trustee[, count]")
        c = int(parts[2]) if len(parts) == 3 else 1
        if c < 0:
            raise ValueError(f"{path}: line {lineno}: negative trust count")
        j, i = label_to_id.get(parts[0]), label_to_id.get(parts[1])
        if j is not None and i is not None:
            counts[(j, i)] += c
    return TrustStatements(dict(counts))


def table_tsv(rows, columns=None, header_comment=None):
    """Rows of dicts as TSV with a header line; None becomes 'NA'."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    out = []
    if header_comment:
        out.append(f"# {header_comment}\n")
    out.append("\t".join(columns) + "\n")
    for r in rows:
        out.append("\t".join(_fmt(r.get(c)) for c in columns) + "\n")
    return "".join(out)


def _fmt(v):
    if v is None:
        return "NA"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)
