"""Tactile object-recognition simulator: procedural meshes, a touch-sensing
hand environment and a blind classification benchmark."""

from ._core import (
    ACTION_COUNT,
    DEFAULT_MAX_STEPS,
    ENV_ID,
    TAXEL_COLS,
    TAXEL_ROWS,
    BenchError,
    DatasetError,
    EnvError,
    Mesh,
    SpatialIndex,
    TouchEnv,
    class_names,
    decode_taxels,
    encode_taxels,
    generate_dataset,
    generate_object,
    generate_object_with,
    run_benchmark,
    sample_params,
    validate_dataset,
)

__all__ = [
    "ACTION_COUNT",
    "DEFAULT_MAX_STEPS",
    "ENV_ID",
    "TAXEL_COLS",
    "TAXEL_ROWS",
    "BenchError",
    "DatasetError",
    "EnvError",
    "Mesh",
    "SpatialIndex",
    "TouchEnv",
    "class_names",
    "decode_taxels",
    "encode_taxels",
    "generate_dataset",
    "generate_object",
    "generate_object_with",
    "run_benchmark",
    "sample_params",
    "validate_dataset",
]
