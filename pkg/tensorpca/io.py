"""
Tensor file formats.

Text: header `n k symmetric_flag` (asymmetric samples use `n k ordered`), then one line per
entry `i1 i2 ... ik weight`. JSON carries the same fields. Both round-trip bit-exactly.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .model import AsymmetricTensorSample, SparseSignedTensor, SpikeVector

logger = logging.getLogger(__name__)

Tensor = Union[SparseSignedTensor, AsymmetricTensorSample]


def _rows(t: Tensor) -> np.ndarray:
    return t.subsets if isinstance(t, SparseSignedTensor) else t.tuples


def write_text(t: Tensor, path: Path, config: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(t, SparseSignedTensor):
        flag = "1" if t.symmetric_flag else "0"
        header = f"{t.n} {t.k} {flag}"
        if t.block_size is not None:
            header += f" {t.block_size}"
    else:
        header = f"{t.n} {t.k} ordered"
    with open(path, "w") as f:
        if config is not None:
            f.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        f.write(header + "\n")
        for row, w in zip(_rows(t), t.weights):
            f.write(" ".join(str(int(i)) for i in row) + f" {int(w)}\n")
    logger.debug(f"wrote {t.m} entries to {path}")
    return path


def read_text(path: Path) -> Tensor:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError(f"{path}: empty tensor file")
    head = lines[0].split()
    n, k = int(head[0]), int(head[1])
    body = np.array([[int(x) for x in ln.split()] for ln in lines[1:]], dtype=np.int64).reshape(-1, k + 1)
    if head[2] == "ordered":
        return AsymmetricTensorSample(n=n, k=k, tuples=body[:, :k], weights=body[:, k])
    block = int(head[3]) if len(head) > 3 else None
    return SparseSignedTensor(n=n, k=k, subsets=body[:, :k], weights=body[:, k],
                              symmetric_flag=head[2] == "1", block_size=block)


def to_json_dict(t: Tensor) -> Dict[str, Any]:
    doc: Dict[str, Any] = {
        "n": t.n,
        "k": t.k,
        "entries": [[int(i) for i in row] + [int(w)] for row, w in zip(_rows(t), t.weights)],
    }
    if isinstance(t, SparseSignedTensor):
        doc["symmetric_flag"] = t.symmetric_flag
        doc["block_size"] = t.block_size
    else:
        doc["ordered"] = True
    return doc


def from_json_dict(doc: Dict[str, Any]) -> Tensor:
    n, k = int(doc["n"]), int(doc["k"])
    body = np.array(doc["entries"], dtype=np.int64).reshape(-1, k + 1)
    if doc.get("ordered"):
        return AsymmetricTensorSample(n=n, k=k, tuples=body[:, :k], weights=body[:, k])
    return SparseSignedTensor(n=n, k=k, subsets=body[:, :k], weights=body[:, k],
                              symmetric_flag=bool(doc.get("symmetric_flag", True)),
                              block_size=doc.get("block_size"))


def write_json(t: Tensor, path: Path, config: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = to_json_dict(t)
    if config is not None:
        doc["config"] = config
    path.write_text(json.dumps(doc, indent=2))
    return path


def read_json(path: Path) -> Tensor:
    return from_json_dict(json.loads(Path(path).read_text()))


def load_tensor(path: Path) -> Tensor:
    """Dispatch on file suffix."""
    path = Path(path)
    return read_json(path) if path.suffix == ".json" else read_text(path)


def save_tensor(t: Tensor, path: Path, config: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    return write_json(t, path, config) if path.suffix == ".json" else write_text(t, path, config)


def save_spike(z: SpikeVector, path: Path, config: Optional[Dict[str, Any]] = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc: Dict[str, Any] = {"values": [int(v) for v in z.values], "block_size": z.block_size}
    if config is not None:
        doc["config"] = config
    path.write_text(json.dumps(doc, indent=2))
    return path


def load_spike(path: Path) -> SpikeVector:
    doc = json.loads(Path(path).read_text())
    return SpikeVector(values=np.array(doc["values"]), block_size=doc.get("block_size"))
