"""Compressed suffix-array self-index for RDF triples."""

from .bitvector import BitVector
from .core import BuildError, Rdfcsa, TripleSet, build
from .dictionary import Dictionary, IngestError, dict_build, load
from .fileformat import ChecksumError, IndexFormatError, read_index, write_index
from .join import JOIN_CLASSES, JoinError, JoinQuery, enumerate_join_types, evaluate, plan_join
from .psi import PsiSegment
from .query import QueryError, TriplePattern, count, locate, plan, resolve

__version__ = "0.1.0"

__all__ = [
    "BitVector", "BuildError", "ChecksumError", "Dictionary", "IndexFormatError",
    "IngestError", "JOIN_CLASSES", "JoinError", "JoinQuery", "PsiSegment", "QueryError",
    "Rdfcsa", "TriplePattern", "TripleSet", "build", "count", "dict_build",
    "enumerate_join_types", "evaluate", "load", "locate", "plan", "plan_join",
    "read_index", "resolve", "write_index",
]
