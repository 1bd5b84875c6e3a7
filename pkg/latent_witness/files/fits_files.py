"""fits_files.py

FITS Storage of Forward Matrices and Statistics Vectors

Each file carries a JSON string in the primary header card METADATA. Arrays
are stored as float64/int64 images, so a write/read cycle is bit-exact.

"""
import json

import numpy as np
from astropy.io import fits
from scipy import sparse

from ..exceptions import StorageError, ValidationError
from ..phase_space.forward import ForwardMatrix
from ..phase_space.statistics import StatVector
from .json_files import dumps

FORMAT_VERSION = 1


def _primary_hdu(kind, metadata, data=None):
    hdr = fits.Header()
    hdr["CONTENT"] = kind
    hdr["FMTVER"] = FORMAT_VERSION
    hdr["METADATA"] = dumps(metadata, compact=True)
    return fits.PrimaryHDU(data=data, header=hdr)


def _write(hdul, path):
    try:
        hdul.writeto(path, overwrite=True)
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e


def _open(path, kind):
    try:
        hdul = fits.open(path, memmap=False)
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e
    header = hdul[0].header
    if header.get("CONTENT") != kind:
        hdul.close()
        raise ValidationError(f"{path} does not hold a {kind}")
    return hdul, json.loads(header["METADATA"])


def save_forward_matrix(forward, path):
    """Saves a ForwardMatrix as DATA / INDICES / INDPTR Image Extensions

    Parameters
    ----------
    forward : ForwardMatrix
        Matrix to store
    path : Path
        Output File Path

    Returns
    -------
    None
    """
    matrix = forward.matrix
    metadata = dict(forward.metadata)
    metadata.update(
        {
            "n_contexts": forward.n_contexts,
            "n_outcomes": forward.n_outcomes,
            "shape": list(matrix.shape),
            "format_version": FORMAT_VERSION,
        }
    )
    hdul = fits.HDUList(
        [
            _primary_hdu("FORWARD_MATRIX", metadata),
            fits.ImageHDU(np.asarray(matrix.data, dtype=np.float64), name="DATA"),
            fits.ImageHDU(np.asarray(matrix.indices, dtype=np.int64), name="INDICES"),
            fits.ImageHDU(np.asarray(matrix.indptr, dtype=np.int64), name="INDPTR"),
        ]
    )
    _write(hdul, path)


def load_forward_matrix(path):
    hdul, metadata = _open(path, "FORWARD_MATRIX")
    with hdul:
        data = np.array(hdul["DATA"].data, dtype=np.float64)
        indices = np.array(hdul["INDICES"].data, dtype=np.int64)
        indptr = np.array(hdul["INDPTR"].data, dtype=np.int64)
    shape = tuple(metadata.pop("shape"))
    n_contexts = metadata.pop("n_contexts")
    n_outcomes = metadata.pop("n_outcomes")
    metadata.pop("format_version", None)
    matrix = sparse.csc_matrix((data, indices, indptr), shape=shape)
    return ForwardMatrix(matrix, n_contexts, n_outcomes, metadata)


def save_statistics(statistics, path):
    """Saves a StatVector as the Primary Image With its Metadata

    Parameters
    ----------
    statistics : StatVector
        Vector to store
    path : Path
        Output File Path

    Returns
    -------
    None
    """
    metadata = dict(statistics.metadata)
    metadata.update(
        {
            "n_contexts": statistics.n_contexts,
            "n_outcomes": statistics.n_outcomes,
            "format_version": FORMAT_VERSION,
        }
    )
    hdu = _primary_hdu("STAT_VECTOR", metadata, np.asarray(statistics.values, dtype=np.float64))
    _write(fits.HDUList([hdu]), path)


def load_statistics(path):
    hdul, metadata = _open(path, "STAT_VECTOR")
    with hdul:
        values = np.array(hdul[0].data, dtype=np.float64)
    n_contexts = metadata.pop("n_contexts")
    n_outcomes = metadata.pop("n_outcomes")
    metadata.pop("format_version", None)
    return StatVector(values, n_contexts, n_outcomes, metadata)
