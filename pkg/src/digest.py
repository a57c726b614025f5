"""Content hashing for prompt digests and FT manifests."""
from cryptography.hazmat.primitives import hashes


def sha256_hex(text: str) -> str:
    digest = hashes.Hash(hashes.SHA256())
    digest.update(text.encode("utf-8"))
    return digest.finalize().hex()
