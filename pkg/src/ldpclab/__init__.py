"""ldpclab: LDPC decoding laboratory.

Sparse parity-check codes with linear-time accumulator encoding, QAM/AWGN
channel simulation, four belief-propagation decoder variants (sum-product,
min-sum, constant-scaled min-sum and staircase variable-scaled min-sum),
and a deterministic Monte-Carlo BER harness with parameter grid search.
"""

from .channel import ChannelParams, Modulation, awgn, demap_llr, ebn0_to_params, modulate
from .codes import (
    AddressTable,
    Code,
    CodeDescriptor,
    SparseParityCheck,
    build_code,
    build_eira,
    builtin_ids,
    code_from_alist,
    encode,
    load_alist,
    load_builtin,
    serialize_alist,
    syndrome,
)
from .decoder import LLR_MAX, DecoderVariant, DecodeResult, decode, svs_alpha
from .sim import (
    BerPoint,
    OptimizationResult,
    SimConfig,
    emit_csv,
    load_csv,
    optimize_parameter,
    run_ber_sweep,
    run_frame,
)

__version__ = "0.1.0"

__all__ = [
    "AddressTable",
    "BerPoint",
    "ChannelParams",
    "Code",
    "CodeDescriptor",
    "DecodeResult",
    "DecoderVariant",
    "LLR_MAX",
    "Modulation",
    "OptimizationResult",
    "SimConfig",
    "SparseParityCheck",
    "awgn",
    "build_code",
    "build_eira",
    "builtin_ids",
    "code_from_alist",
    "decode",
    "demap_llr",
    "ebn0_to_params",
    "emit_csv",
    "encode",
    "load_alist",
    "load_builtin",
    "load_csv",
    "modulate",
    "optimize_parameter",
    "run_ber_sweep",
    "run_frame",
    "serialize_alist",
    "svs_alpha",
    "syndrome",
    "__version__",
]
