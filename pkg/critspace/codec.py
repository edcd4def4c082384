"""JSON formats for tensors and points.

Tensor document::

    {"factors": [{"dim": 2, "degree": 3}], "coeffs": [[re, im], ...]}
    {"exterior": {"dim": 4, "k": 2}, "coeffs": [[re, im], ...]}

Coefficients follow the basis order of ``tensor_core`` (graded-lex per
factor, first factor slowest) or the lexicographic subset order of
``exterior``. Point document: ``{"vectors": [[[re, im], ...], ...]}``.
"""

import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from .exterior import AlternatingTensor
from .tensor_core import Factor, PSTensor, Shape, VectorTuple

Tensor = Union[PSTensor, AlternatingTensor]
ComplexPair = Tuple[float, float]


class ExteriorSpec(BaseModel):
    dim: int = Field(ge=1)
    k: int = Field(ge=0)


class TensorDocument(BaseModel):
    factors: Optional[List[Factor]] = None
    exterior: Optional[ExteriorSpec] = None
    coeffs: List[ComplexPair]

    @model_validator(mode="after")
    def _one_space(self) -> "TensorDocument":
        if (self.factors is None) == (self.exterior is None):
            raise ValueError("exactly one of 'factors' or 'exterior' is required")
        return self


class PointDocument(BaseModel):
    vectors: List[List[ComplexPair]] = Field(min_length=1)


def encode_complex(values) -> List[List[float]]:
    arr = np.asarray(values, dtype=complex).ravel()
    return [[float(z.real), float(z.imag)] for z in arr]


def decode_complex(pairs: Sequence[Sequence[float]]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=complex)


def tensor_to_document(f: Tensor) -> TensorDocument:
    if isinstance(f, AlternatingTensor):
        return TensorDocument(exterior=ExteriorSpec(dim=f.n_plus_1, k=f.k), coeffs=encode_complex(f.coeffs))
    return TensorDocument(factors=list(f.shape.factors), coeffs=encode_complex(f.flat))


def tensor_from_document(doc: TensorDocument) -> Tensor:
    coeffs = decode_complex(doc.coeffs)
    if doc.exterior is not None:
        return AlternatingTensor(doc.exterior.dim, doc.exterior.k, coeffs)
    return PSTensor(Shape(factors=tuple(doc.factors)), coeffs)


def tensor_to_dict(f: Tensor) -> dict:
    return tensor_to_document(f).model_dump(exclude_none=True)


def dumps_tensor(f: Tensor) -> str:
    return tensor_to_document(f).model_dump_json(exclude_none=True)


def loads_tensor(text: str) -> Tensor:
    """Parse a tensor document; malformed documents and length mismatches raise ValueError."""
    try:
        doc = TensorDocument.model_validate_json(text)
    except ValidationError as e:
        raise ValueError(f"invalid tensor document: {e}") from e
    return tensor_from_document(doc)


def read_tensor(path: Union[str, Path]) -> Tensor:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ValueError(f"cannot read tensor file {path}: {e}") from e
    return loads_tensor(text)


def write_tensor(path: Union[str, Path], f: Tensor) -> None:
    Path(path).write_text(dumps_tensor(f))


def point_to_dict(t: VectorTuple) -> dict:
    return {"vectors": [encode_complex(v) for v in t]}


def loads_point(text: str) -> Union[Tensor, VectorTuple]:
    """A point file holds either a tensor document or a vector tuple."""
    raw = json.loads(text)
    if isinstance(raw, dict) and "vectors" in raw:
        try:
            doc = PointDocument.model_validate(raw)
        except ValidationError as e:
            raise ValueError(f"invalid point document: {e}") from e
        return VectorTuple([decode_complex(v) for v in doc.vectors])
    return loads_tensor(text)


def read_point(path: Union[str, Path]) -> Union[Tensor, VectorTuple]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ValueError(f"cannot read point file {path}: {e}") from e
    return loads_point(text)
