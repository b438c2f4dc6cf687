"""XOR fountain-code erasure coding with local repair groups.

Files are striped into ``b * t`` byte partitions, extended by an array-LDPC
precode and spread as LDGM coding chunks over ``s`` disk files.  Decoding is
pure belief propagation; repair can use coding-only XOR groups instead of a
full decode.
"""
from .checks import (CheckSet, cga, derive_checks_degree_one, derive_checks_via_precode,
                     extract_check_sets, gen_checks, order_check_sets, parse_checkdata,
                     serialize_checkdata, set_xor)
from .codec import (Code, DecodingPath, bp_decode_stripe, bp_peel, choose_parameters,
                    decode_file, dpg, encode_file, encode_stripe, plan_decode, xor_accumulate)
from .errors import (ConfigurationError, DecodeFailure, FormatError, FountainError,
                     MetadataError, NonConvergenceError, ParameterError, RepairFailure)
from .graph import GeneratorMatrix, build_generator, erasure_set, normalize_n
from .metadata import Metadata, read_metadata, write_metadata
from .precode import (Check1Sets, Thresholds, adjust_parameters, apply_precode, build_check1,
                      largest_prime_factor, precode_bp)
from .reliability import ReliabilityReport, enumerate_failures, simdisk
from .repair import (RepairPlan, RepairReport, conventional_repair, execute_repair,
                     plan_fast_repair, update_code)
from .rngdist import (DEFAULT_SEED, DegreeDistribution, RandomStream, lcg_next,
                      make_distribution, sample_degree, sample_neighbors)

__version__ = "0.1.0"
