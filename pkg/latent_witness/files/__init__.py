from .json_files import dumps, read_json, write_json
from .fits_files import save_forward_matrix, load_forward_matrix, save_statistics, load_statistics
from .csv_files import write_frame, read_frame, save_statistics_csv, load_statistics_csv
from .trial_log import write_trial_log, read_trial_log
from .directions import read_directions, write_directions
from .manifest import HOST_NAME, RunDirectory, run_directory, write_manifest
