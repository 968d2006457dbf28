"""Performance bank: trial records, winners and ground-truth task similarity."""

from .records import FAMILIES, Bank, BankRecord, append_records, bank_from_records, config_signature, load_bank
from .similarity import SimilarityMatrix, graphgym_similarity, kendall_tau, load_similarity
from .winners import Winner, representative, winner, winners

__all__ = (
    "FAMILIES",
    "Bank",
    "BankRecord",
    "SimilarityMatrix",
    "Winner",
    "append_records",
    "bank_from_records",
    "config_signature",
    "graphgym_similarity",
    "kendall_tau",
    "load_bank",
    "load_similarity",
    "representative",
    "winner",
    "winners",
)
