"""Reader/writer for the alist sparse parity-check interchange format.

Layout (1-indexed adjacency): line 1 "n_var n_chk"; line 2 max degrees;
lines 3-4 per-node degree lists; then one adjacency line per variable node
followed by one per check node.  Zero padding is tolerated on input and
never written.
"""

from __future__ import annotations

import numpy as np

from .tanner import TannerGraph


class AlistFormatError(ValueError):
    """Malformed alist content; message carries the offending line number."""


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise AlistFormatError(f"line {lineno}: non-integer token ({exc})") from None


def parse_alist(text: str) -> TannerGraph:
    content = [
        (i + 1, line) for i, line in enumerate(text.splitlines()) if line.split()
    ]

    def line(section_idx: int, what: str) -> tuple[int, str]:
        if section_idx >= len(content):
            raise AlistFormatError(f"end of file: missing {what}")
        return content[section_idx]

    lineno, raw = line(0, "dimension line 'n_var n_chk'")
    dims = _ints(raw, lineno)
    if len(dims) != 2:
        raise AlistFormatError(f"line {lineno}: expected 'n_var n_chk'")
    n_var, n_chk = dims
    if n_var <= 0 or n_chk <= 0:
        raise AlistFormatError(f"line {lineno}: dimensions must be positive")

    lineno, raw = line(1, "max-degree line")
    if len(_ints(raw, lineno)) != 2:
        raise AlistFormatError(f"line {lineno}: expected 'max_var_deg max_chk_deg'")
    lineno, raw = line(2, "variable degree list")
    var_degs = _ints(raw, lineno)
    if len(var_degs) != n_var:
        raise AlistFormatError(f"line {lineno}: expected {n_var} variable degrees")
    lineno, raw = line(3, "check degree list")
    chk_degs = _ints(raw, lineno)
    if len(chk_degs) != n_chk:
        raise AlistFormatError(f"line {lineno}: expected {n_chk} check degrees")

    chk_adj: list[list[int]] = [[] for _ in range(n_chk)]
    for v in range(n_var):
        lineno, raw = line(4 + v, f"adjacency of variable {v + 1}")
        entries = [e for e in _ints(raw, lineno) if e != 0]
        if len(entries) != var_degs[v]:
            raise AlistFormatError(
                f"line {lineno}: variable {v + 1} lists {len(entries)} "
                f"checks, degree says {var_degs[v]}"
            )
        for c in entries:
            if not 1 <= c <= n_chk:
                raise AlistFormatError(f"line {lineno}: check index {c} out of range")
            chk_adj[c - 1].append(v)

    for c in range(n_chk):
        lineno, raw = line(4 + n_var + c, f"adjacency of check {c + 1}")
        entries = [e for e in _ints(raw, lineno) if e != 0]
        if len(entries) != chk_degs[c]:
            raise AlistFormatError(
                f"line {lineno}: check {c + 1} lists {len(entries)} "
                f"variables, degree says {chk_degs[c]}"
            )
        claimed = sorted(e - 1 for e in entries)
        if claimed != sorted(chk_adj[c]):
            raise AlistFormatError(
                f"line {lineno}: check {c + 1} adjacency disagrees with the "
                f"variable section"
            )

    return TannerGraph(
        n_var=n_var,
        n_chk=n_chk,
        chk_adj=[np.array(sorted(a), dtype=np.int32) for a in chk_adj],
    )


def emit_alist(graph: TannerGraph) -> str:
    var_adj: list[list[int]] = [[] for _ in range(graph.n_var)]
    for c, adj in enumerate(graph.chk_adj):
        for v in adj.tolist():
            var_adj[v].append(c)
    var_degs = [len(a) for a in var_adj]
    chk_degs = [len(a) for a in graph.chk_adj]

    out = [
        f"{graph.n_var} {graph.n_chk}",
        f"{max(var_degs)} {max(chk_degs)}",
        " ".join(str(d) for d in var_degs),
        " ".join(str(d) for d in chk_degs),
    ]
    for a in var_adj:
        out.append(" ".join(str(c + 1) for c in sorted(a)))
    for adj in graph.chk_adj:
        out.append(" ".join(str(v + 1) for v in sorted(adj.tolist())))
    return "\n".join(out) + "\n"


def read_alist(path) -> TannerGraph:
    with open(path, "r") as f:
        return parse_alist(f.read())


def write_alist(path, graph: TannerGraph) -> None:
    with open(path, "w") as f:
        f.write(emit_alist(graph))
