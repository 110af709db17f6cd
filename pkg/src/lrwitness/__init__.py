"""Exact verification of an improperness certificate for the Long-Reid group
acting on T_3 x T_4, plus a search engine for further witnesses."""

from .exact import IDENTITY, ProjectiveMatrix, canonicalize, det, inverse, mul, trace, valuation
from .family import (
    RepFamily,
    check_constraint,
    check_relator,
    evaluate_word,
    long_reid_generators,
    make_family,
)
from .tree import PrimeContext, VertexKey, displacement, is_vertex_stabilizer, vertex_key, vertex_pair
from .witness import (
    OrderClass,
    WitnessRecord,
    build_record,
    classify_order,
    verify_certificate,
    verify_paper_certificate,
)
from .words import format_word, free_reduce, invert_word, paper_witness_word, parse_word

__version__ = "0.1.0"
STRUCTURED_FORMAT_VERSION = 1
