"""Approximate bilinear matrix multiplication: exact verification and numeric execution."""
from .laurent import LaurentPoly, poly, add, mul, order, eval_poly, eval_exact, format_poly, parse_poly
from .model import (BilinearAlgorithm, CoefficientCensus, FormatError, EncodingError,
                    decode_decimal_entry, encode_decimal_entry, parse_algorithm,
                    serialize_algorithm, load_algorithm, builtin, census, transpose_gamma)
from .verify import VerificationReport, target_tensor, residual, verify, objective_value
from .executor import (linear_forms, multiply_once, multiply_recursive, multiply_exact,
                       MultCounter, classical_product)
from .analysis import SweepResult, relative_error, sweep, digits_of_precision, op_counts

__version__ = "0.1.0"
