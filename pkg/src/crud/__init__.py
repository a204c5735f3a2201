# flake8: noqa

from .run import (
    record_experiment,
    get_run,
    list_runs,
    get_trials_for_run,
    delete_run,
)
