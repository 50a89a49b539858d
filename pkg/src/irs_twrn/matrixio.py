"""Plain-text matrix dumps for golden-file and cross-implementation regression tests.

Format: one matrix per record. A header line ``# <name> <rows> <cols>`` is
followed by ``rows`` lines of ``cols`` comma-separated ``re,im`` pairs
separated by spaces, in row-major order. Vectors are stored as a single row.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from .channels import ChannelSet
from .training import TrainingMatrix


def format_matrix(name: str, A) -> str:
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    lines = [f"# {name} {A.shape[0]} {A.shape[1]}"]
    for row in A:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def dump_matrices(path: str | Path, matrices: Mapping[str, np.ndarray]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for name, A in matrices.items():
            fh.write(format_matrix(name, A))


def parse_matrices(text: str) -> dict[str, np.ndarray]:
    out: dict[str, np.ndarray] = {}
    lines = [ln for ln in text.splitlines() if ln.strip()]
    i = 0
    while i < len(lines):
        head = lines[i].split()
        if head[0] != "#" or len(head) != 4:
            raise ValueError(f"bad record header: {lines[i]!r}")
        name, rows, cols = head[1], int(head[2]), int(head[3])
        A = np.empty((rows, cols), dtype=complex)
        for r in range(rows):
            pairs = lines[i + 1 + r].split()
            if len(pairs) != cols:
                raise ValueError(f"{name}: row {r} has {len(pairs)} entries, expected {cols}")
            for c, pair in enumerate(pairs):
                re, im = pair.split(",")
                A[r, c] = complex(float(re), float(im))
        out[name] = A
        i += rows + 1
    return out


def load_matrices(path: str | Path) -> dict[str, np.ndarray]:
    return parse_matrices(Path(path).read_text(encoding="utf-8"))


def dump_channels(path: str | Path, channels: ChannelSet) -> None:
    dump_matrices(
        path,
        {
            "h_u1i": channels.h_u1i,
            "h_u2i": channels.h_u2i,
            "H_ir": channels.H_ir,
            "h_u1r": channels.h_u1r,
            "h_u2r": channels.h_u2r,
            "H_u1ir": channels.H_u1ir,
            "H_u2ir": channels.H_u2ir,
        },
    )


def load_channels(path: str | Path) -> ChannelSet:
    m = load_matrices(path)
    return ChannelSet.from_links(m["h_u1i"][0], m["h_u2i"][0], m["H_ir"], m["h_u1r"][0], m["h_u2r"][0])


def dump_training_matrix(path: str | Path, Q: TrainingMatrix) -> None:
    bits = "inf" if Q.quant_bits is None else str(Q.quant_bits)
    dump_matrices(path, {f"Q:{Q.scheme.value}:{bits}": Q.entries})


def load_training_matrix(path: str | Path) -> TrainingMatrix:
    ((name, A),) = load_matrices(path).items()
    _, scheme, bits = name.split(":")
    return TrainingMatrix(A, scheme, None if bits == "inf" else int(bits))
