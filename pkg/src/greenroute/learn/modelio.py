"""Plain-text model files.

Layout (one section header per line, values space separated, row-major)::

    TARGET umin
    K 40
    MEAN 132
    <132 floats>
    EIGENVALUES 132
    <132 floats>
    COMPONENTS 132 132
    <132 lines of 132 floats>
    WEIGHTS 41
    <41 floats>

Floats are written with ``repr`` so a save/load cycle is bit-exact.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .pca import PcaModel
from .regression import RegressionModel


class ModelFileError(ValueError):
    pass


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


def format_model(pca: PcaModel, reg: RegressionModel) -> str:
    n = pca.n_features
    out = [
        f"TARGET {reg.target}",
        f"RIDGE {int(reg.ridge)}",
        f"DEGENERATE {int(pca.degenerate)}",
        f"K {pca.k}",
        f"MEAN {n}",
        _row(pca.mean),
        f"EIGENVALUES {n}",
        _row(pca.eigenvalues),
        f"COMPONENTS {n} {pca.components.shape[1]}",
    ]
    out += [_row(r) for r in pca.components]
    out += [f"WEIGHTS {reg.weights.shape[0]}", _row(reg.weights)]
    return "\n".join(out) + "\n"


def parse_model(text: str) -> tuple[PcaModel, RegressionModel]:
    lines = [l for l in text.splitlines() if l.strip()]
    pos = 0
    fields: dict[str, object] = {}

    def floats(line: str, count: int) -> np.ndarray:
        vals = np.array([float(v) for v in line.split()])
        if vals.shape[0] != count:
            raise ModelFileError(f"expected {count} values, got {vals.shape[0]}")
        return vals

    try:
        while pos < len(lines):
            head = lines[pos].split()
            key = head[0]
            pos += 1
            if key in ("TARGET",):
                fields[key] = head[1]
            elif key in ("RIDGE", "DEGENERATE", "K"):
                fields[key] = int(head[1])
            elif key in ("MEAN", "EIGENVALUES", "WEIGHTS"):
                fields[key] = floats(lines[pos], int(head[1]))
                pos += 1
            elif key == "COMPONENTS":
                r, c = int(head[1]), int(head[2])
                fields[key] = np.vstack([floats(l, c) for l in lines[pos:pos + r]])
                pos += r
            else:
                raise ModelFileError(f"unknown section {key!r}")
        pca = PcaModel(fields["MEAN"], fields["EIGENVALUES"], fields["COMPONENTS"], fields["K"],
                       bool(fields.get("DEGENERATE", 0)))
        reg = RegressionModel(fields["WEIGHTS"], fields["TARGET"], bool(fields.get("RIDGE", 0)))
    except (KeyError, IndexError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise ModelFileError(f"malformed model file: {exc}") from exc
    return pca, reg


def save_model(path: str | Path, pca: PcaModel, reg: RegressionModel) -> None:
    Path(path).write_text(format_model(pca, reg))


def load_model(path: str | Path) -> tuple[PcaModel, RegressionModel]:
    return parse_model(Path(path).read_text())
