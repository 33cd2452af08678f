"""Line-oriented instance files.

One header line, then blocks, all 1-based and decimal (booleans as 0/1):

    type1 semiring=bool n=4 k=2 tau=0.5
    M
    <n rows of n space-separated values>
    V 1
    ...
    V 2
    ...
    P 1 nnz=2
    1 3 1            # row col value
    2 1 1
    P 2 nnz=2
    ...
    query 3          # optional, any number of lines

    type2 semiring=nat n=3 k=2 d=3 tau=1.0
    V 1
    ...
    V 2
    ...
    P diag nnz=2
    1 2              # diagonal index, value
    3 1
    query 2:1        # direction:index pairs; a bare "query" fixes nothing

``parse(serialize(x)) == x`` for every valid instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FormatError
from .matrix import DenseMatrix, SparseMatrix
from .semiring import get_semiring
from .type2 import DiagonalTensor, SliceQuery


@dataclass
class Instance:
    """Everything one problem instance carries, either type."""

    type: int  # 1 or 2
    semiring: str
    n: int
    k: int
    tau: float
    d: int | None = None
    M: DenseMatrix | None = None
    Vs: list[DenseMatrix] = field(default_factory=list)
    Ps: list[SparseMatrix] = field(default_factory=list)
    P: DiagonalTensor | None = None
    queries: list = field(default_factory=list)  # ints (type 1) or SliceQuery


def _dense_lines(mat: DenseMatrix) -> list[str]:
    return [" ".join(str(int(x)) for x in row) for row in mat.data]


def serialize(inst: Instance) -> str:
    lines = []
    if inst.type == 1:
        lines.append(
            f"type1 semiring={inst.semiring} n={inst.n} k={inst.k} tau={inst.tau}"
        )
        lines.append("M")
        lines.extend(_dense_lines(inst.M))
    elif inst.type == 2:
        d = inst.d if inst.d is not None else inst.n
        lines.append(
            f"type2 semiring={inst.semiring} n={inst.n} k={inst.k} d={d} tau={inst.tau}"
        )
    else:
        raise FormatError(f"unknown instance type {inst.type}")
    for j, V in enumerate(inst.Vs, start=1):
        lines.append(f"V {j}")
        lines.extend(_dense_lines(V))
    if inst.type == 1:
        for j, P in enumerate(inst.Ps, start=1):
            lines.append(f"P {j} nnz={P.nnz}")
            lines.extend(f"{r} {c} {v}" for r, c, v in P.entries())
        for q in inst.queries:
            lines.append(f"query {q}")
    else:
        lines.append(f"P diag nnz={inst.P.nnz}")
        lines.extend(f"{j} {v}" for j, v in inst.P.entries())
        for q in inst.queries:
            if q.pairs:
                lines.append("query " + " ".join(f"{l}:{i}" for l, i in q.pairs))
            else:
                lines.append("query")
    return "\n".join(lines) + "\n"


class _Lines:
    def __init__(self, text: str):
        self.lines = [ln.rstrip("\n") for ln in text.splitlines()]
        self.pos = 0

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise FormatError("unexpected end of instance file")
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def peek(self) -> str | None:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def done(self) -> bool:
        return self.pos >= len(self.lines)


def _parse_header(line: str) -> dict:
    parts = line.split()
    if not parts or parts[0] not in ("type1", "type2"):
        raise FormatError(f"bad header: {line!r}")
    out = {"type": 1 if parts[0] == "type1" else 2}
    for token in parts[1:]:
        if "=" not in token:
            raise FormatError(f"bad header token: {token!r}")
        key, val = token.split("=", 1)
        out[key] = val
    try:
        out["n"] = int(out["n"])
        out["k"] = int(out["k"])
        out["tau"] = float(out["tau"])
        if out["type"] == 2:
            out["d"] = int(out["d"])
        get_semiring(out["semiring"])
    except (KeyError, ValueError) as exc:
        raise FormatError(f"bad header {line!r}: {exc}") from None
    return out


def _parse_dense(lines: _Lines, sr_name: str, rows: int, cols: int) -> DenseMatrix:
    sr = get_semiring(sr_name)
    data = []
    for _ in range(rows):
        toks = lines.next().split()
        if len(toks) != cols:
            raise FormatError(f"expected {cols} values per row, got {len(toks)}")
        try:
            data.append([int(t) for t in toks])
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    return DenseMatrix(sr, data)


def _expect(line: str, want: str) -> None:
    if line != want:
        raise FormatError(f"expected {want!r}, got {line!r}")


def parse(text: str) -> Instance:
    lines = _Lines(text)
    hdr = _parse_header(lines.next())
    n, k = hdr["n"], hdr["k"]
    sr = get_semiring(hdr["semiring"])
    inst = Instance(
        type=hdr["type"], semiring=hdr["semiring"], n=n, k=k, tau=hdr["tau"],
        d=hdr.get("d"),
    )
    if inst.type == 1:
        _expect(lines.next(), "M")
        inst.M = _parse_dense(lines, inst.semiring, n, n)
        cols = n
    else:
        cols = inst.d
    for j in range(1, k + 1):
        _expect(lines.next(), f"V {j}")
        inst.Vs.append(_parse_dense(lines, inst.semiring, n, cols))
    if inst.type == 1:
        for j in range(1, k + 1):
            head = lines.next().split()
            if len(head) != 3 or head[0] != "P" or head[1] != str(j) or not head[2].startswith("nnz="):
                raise FormatError(f"bad sparse block header: {' '.join(head)!r}")
            nnz = int(head[2][4:])
            entries = []
            for _ in range(nnz):
                toks = lines.next().split()
                if len(toks) != 3:
                    raise FormatError(f"bad sparse entry: {toks!r}")
                entries.append((int(toks[0]), int(toks[1]), int(toks[2])))
            inst.Ps.append(SparseMatrix(sr, n, n, entries))
        while not lines.done():
            toks = lines.next().split()
            if not toks:
                continue
            if toks[0] != "query" or len(toks) != 2:
                raise FormatError(f"bad query line: {' '.join(toks)!r}")
            inst.queries.append(int(toks[1]))
    else:
        head = lines.next().split()
        if len(head) != 3 or head[:2] != ["P", "diag"] or not head[2].startswith("nnz="):
            raise FormatError(f"bad diagonal block header: {' '.join(head)!r}")
        nnz = int(head[2][4:])
        entries = []
        for _ in range(nnz):
            toks = lines.next().split()
            if len(toks) != 2:
                raise FormatError(f"bad diagonal entry: {toks!r}")
            entries.append((int(toks[0]), int(toks[1])))
        inst.P = DiagonalTensor(sr, k, inst.d, entries)
        while not lines.done():
            toks = lines.next().split()
            if not toks:
                continue
            if toks[0] != "query":
                raise FormatError(f"bad query line: {' '.join(toks)!r}")
            pairs = []
            for tok in toks[1:]:
                if ":" not in tok:
                    raise FormatError(f"bad query pair: {tok!r}")
                l, i = tok.split(":", 1)
                pairs.append((int(l), int(i)))
            inst.queries.append(SliceQuery(pairs))
    return inst
