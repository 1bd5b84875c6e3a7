"""config_loader.py

Module Containing Brief Functions for Validating, Parsing and Overriding YAML

"""
import copy
from pathlib import Path

import yamale
import yaml

from .exceptions import ValidationError, StorageError

root_folder = Path(__file__).parent.parent
default_config_path = Path(root_folder, "config", "config.yaml")
default_schema_path = Path(root_folder, "config", "schema.yaml")


def validate_yaml_schema(config_path, schema_path):
    """Validates YAML Config File Against Schema

    Parameters
    ----------
    config_path : str
        Name / Path to the config.yaml File
    schema_path : str
        Name / Path to the schema.yaml File

    Returns
    -------
    bool
        If the Yamale Validates Properly

    Raises
    ------
    ValidationError
        If the file does not match the schema
    """
    schema = yamale.make_schema(str(schema_path))
    data = yamale.make_data(str(config_path))
    try:
        yamale.validate(schema, data)
    except yamale.YamaleError as e:
        raise ValidationError(str(e)) from e
    return True


def validate_config_dict(config, schema_path=default_schema_path):
    """Validates an Already Loaded (and Possibly Overridden) Config Dictionary

    Parameters
    ----------
    config : dict
        Dictionary containing configuration info
    schema_path : str
        Name / Path to the schema.yaml File

    Returns
    -------
    bool
        If the Yamale Validates Properly
    """
    schema = yamale.make_schema(str(schema_path))
    try:
        yamale.validate(schema, [(config, "<effective config>")])
    except yamale.YamaleError as e:
        raise ValidationError(str(e)) from e
    return True


def load_yaml(config_path):
    """Parses

    Parameters
    ----------
    config_path : str
        Name / Path to the config.yaml File

    Returns
    -------
    config : dict
        Dictionary containing configuration info
    """
    try:
        with open(config_path) as file:
            # The FullLoader parameter handles the conversion from YAML
            # scalar values to Python the dictionary format
            config = yaml.load(file, Loader=yaml.FullLoader)
    except OSError as e:
        raise StorageError(f"Cannot read config file {config_path}: {e}") from e
    return config


def apply_overrides(config, overrides):
    """Applies Dotted-Key Overrides to a Config Dictionary

    Flags win over the file: ``["GRID.points_per_axis=20", "SEED=7"]`` sets the
    nested and top-level keys. Values are typed with the YAML scalar rules, so
    ``20`` becomes an int and ``[0.1, 0.2]`` a list.

    Parameters
    ----------
    config : dict
        Dictionary containing configuration info
    overrides : list(str)
        Strings of the form KEY.SUBKEY=VALUE

    Returns
    -------
    dict
        New dictionary with the overrides applied
    """
    config = copy.deepcopy(config)
    for override in overrides:
        if "=" not in override:
            raise ValidationError(f"Override '{override}' is not of the form KEY=VALUE")
        key, value = override.split("=", 1)
        set_value(config, key, yaml.safe_load(value))
    return config


def set_value(config, key, value):
    """Sets a Dotted Key (e.g. "SOLVER.tol") in Place, Creating Missing Levels

    Parameters
    ----------
    config : dict
        Dictionary containing configuration info
    key : str
        Dotted key
    value
        New value

    Returns
    -------
    None
    """
    parts = [part for part in key.strip().split(".") if part]
    if not parts:
        raise ValidationError(f"Override key '{key}' is empty")
    node = config
    for part in parts[:-1]:
        if not isinstance(node.get(part), dict):
            node[part] = {}
        node = node[part]
    node[parts[-1]] = value


def dump_yaml(config, path):
    """Writes the Effective Config Dictionary Back Out as YAML

    Parameters
    ----------
    config : dict
        Dictionary containing configuration info
    path : Path
        Output File Path

    Returns
    -------
    None
    """
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        yaml.safe_dump(config, file, sort_keys=True, default_flow_style=False)
