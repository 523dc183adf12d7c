"""
File utility functions for output directories and stable hashing.
"""

import hashlib
import os


def ensure_dir(path):
    """
    Create an output directory if it does not exist yet.

    Args:
        path: Target directory

    Returns:
        str: The directory path
    """
    os.makedirs(path, exist_ok=True)
    return path


def sha256_file(path):
    """
    Hex digest of a file's bytes, used for config provenance.

    Args:
        path: File to hash

    Returns:
        str: Hex digest
    """
    digest = hashlib.sha256()
    with open(path, 'rb') as fh:
        for chunk in iter(lambda: fh.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()
