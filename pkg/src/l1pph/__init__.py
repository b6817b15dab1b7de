"""Property-preserving hashing for an asymmetric l1-distance predicate on images."""

from .field import PrimeField, inv_mod, is_prime, next_prime
from .imaging import BlockPlan, Image, adjust, plan_blocks, read_image, split_blocks, write_image
from .metrics import PredicateParams, dotdiv, nad, norm, one_sided, predicate_as, threshold_from_nad
from .poly import MINUS_INF, Poly, eea_until, inv_mod_t, mul_mod_t
from .pph import Digest, EvalOutcome, HashKey, InverseDigest, samp
from .store import DetectReport, HashDatabase, detect, load, prepare, save, setup

__version__ = "0.1.0"

__all__ = [
    "BlockPlan", "DetectReport", "Digest", "EvalOutcome", "HashDatabase", "HashKey", "Image",
    "InverseDigest", "MINUS_INF", "Poly", "PredicateParams", "PrimeField", "adjust", "detect",
    "dotdiv", "eea_until", "inv_mod", "inv_mod_t", "is_prime", "load", "mul_mod_t", "nad",
    "next_prime", "norm", "one_sided", "plan_blocks", "predicate_as", "prepare", "read_image",
    "samp", "save", "setup", "split_blocks", "threshold_from_nad", "write_image",
]
