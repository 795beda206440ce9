from .dd import NotPolytopalError, materialize_expr, vertices_from_normals
from .expr import (
    INF,
    BodyValidationError,
    IntersectPoly,
    PBall,
    PolytopeH,
    PolytopeV,
    Scale,
    SumInf,
    SumOne,
    is_polytopal,
    polar_expr,
)
from .faces import (
    FaceDescriptor,
    WitnessedSupportSet,
    WitnessError,
    compute_d,
    compute_f,
    exposed_face,
    f_value,
    max_support_dim,
)
from .space import SpaceHandle, close, is_exact, is_unit, materialize, norm, polar

__all__ = [
    "INF",
    "BodyValidationError",
    "FaceDescriptor",
    "IntersectPoly",
    "NotPolytopalError",
    "PBall",
    "PolytopeH",
    "PolytopeV",
    "Scale",
    "SpaceHandle",
    "SumInf",
    "SumOne",
    "WitnessError",
    "WitnessedSupportSet",
    "close",
    "compute_d",
    "compute_f",
    "exposed_face",
    "f_value",
    "is_exact",
    "is_polytopal",
    "is_unit",
    "materialize",
    "materialize_expr",
    "max_support_dim",
    "norm",
    "polar",
    "polar_expr",
    "vertices_from_normals",
]
