"""manifest.py

Run Directories and Their Content-Hash Manifests

"""
import time
from pathlib import Path

from ..exceptions import StorageError
from ..utilities.functions import file_checksum
from .json_files import write_json

MANIFEST_NAME = "manifest.json"
# machine-dependent facts of a run, kept out of the manifest
HOST_NAME = "host.json"
UNHASHED = frozenset({MANIFEST_NAME, HOST_NAME})


class RunDirectory:
    """
    Output Location of One Run, Created When the First File is Placed in it

    A run that fails before writing anything leaves no directory behind.

    Attributes
    ----------
    path : Path
        Location of the run directory
    """

    def __init__(self, path):
        self.path = Path(path)

    def __truediv__(self, name):
        return self.create() / name

    def __str__(self):
        return str(self.path)

    @property
    def name(self):
        return self.path.name

    def exists(self):
        return self.path.is_dir()

    def create(self):
        try:
            self.path.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise StorageError(f"Cannot create run directory {self.path}: {e}") from e
        return self.path


def run_directory(root, command, label=None, timestamps=False):
    """Names the Output Directory of One Run Without Creating it

    Parameters
    ----------
    root : str or Path
        Parent output directory
    command : str
        Subcommand name
    label : str, optional
        Explicit directory name
    timestamps : bool
        Append the start time to the default name

    Returns
    -------
    RunDirectory
    """
    if label is None:
        label = command
        if timestamps:
            label += time.strftime("-%Y_%m_%d_%H_%M_%S")
    return RunDirectory(Path(root).expanduser() / label)


def write_manifest(directory):
    """Writes sha256 Hashes of Every Reproducible File in the Run Directory

    Parameters
    ----------
    directory : Path or RunDirectory
        Run directory

    Returns
    -------
    dict
        Relative path to hex digest
    """
    if isinstance(directory, RunDirectory):
        directory = directory.create()
    directory = Path(directory)
    hashes = {
        path.relative_to(directory).as_posix(): file_checksum(path)
        for path in sorted(directory.rglob("*"))
        if path.is_file() and path.name not in UNHASHED
    }
    write_json({"files": hashes}, directory / MANIFEST_NAME)
    return hashes
