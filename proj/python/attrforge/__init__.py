"""Person-attribute extraction from tagged sentences."""

from ._attrforge import (
    Corpus,
    DataError,
    Model,
    ModelFormatError,
    ParseError,
    __version__,
    bundled_rules,
    classifier_count,
    evaluate,
    extract,
    generate,
    render_report,
    train,
    train_svm,
)

__all__ = [
    "Corpus",
    "DataError",
    "Model",
    "ModelFormatError",
    "ParseError",
    "bundled_rules",
    "classifier_count",
    "evaluate",
    "extract",
    "generate",
    "render_report",
    "train",
    "train_svm",
]
