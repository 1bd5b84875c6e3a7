"""directions.py

Reading Spin Readout Directions From a CSV Table

"""
from pathlib import Path

import astropy.units as u
import numpy as np
from astropy.table import Table

from ..exceptions import StorageError, ValidationError
from ..spin.sphere import DirectionSet

REQUIRED_COLUMNS = ("polar", "azimuth", "threshold")


def read_directions(path):
    """Loads Directions and Thresholds

    The table has columns polar and azimuth in degrees and threshold in
    spin-projection units; a name column is optional.

    Parameters
    ----------
    path : str or Path
        CSV File Path

    Returns
    -------
    DirectionSet
    """
    try:
        table = Table.read(Path(path), format="ascii.csv")
    except OSError as e:
        raise StorageError(f"Cannot read {path}: {e}") from e
    missing = [name for name in REQUIRED_COLUMNS if name not in table.colnames]
    if missing:
        raise ValidationError(f"{path} is missing columns {missing}")
    polar = (np.asarray(table["polar"], dtype=float) * u.deg).to_value(u.rad)
    azimuth = (np.asarray(table["azimuth"], dtype=float) * u.deg).to_value(u.rad)
    return DirectionSet.from_angles(polar, azimuth, np.asarray(table["threshold"], dtype=float))


def write_directions(directions, path):
    """Writes a DirectionSet in the Format read_directions Accepts"""
    polar, azimuth = directions.angles()
    table = Table(
        {
            "polar": (polar * u.rad).to_value(u.deg),
            "azimuth": (azimuth * u.rad).to_value(u.deg),
            "threshold": directions.thresholds,
        }
    )
    try:
        table.write(Path(path), format="ascii.csv", overwrite=True)
    except OSError as e:
        raise StorageError(f"Cannot write {path}: {e}") from e
