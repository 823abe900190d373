#!/usr/bin/env python3

import os
import psutil

BLAS_THREAD_VARIABLES = (
    "OMP_NUM_THREADS",
    "OPENBLAS_NUM_THREADS",
    "MKL_NUM_THREADS",
    "NUMEXPR_NUM_THREADS",
)


def setup_env_variables(env_variables: dict):
    for key, value in env_variables.items():
        os.environ[key] = str(value)


def default_thread_count() -> int:
    return psutil.cpu_count(logical=True) or 1


def thread_variables(threads: int) -> dict:
    return {name: threads for name in BLAS_THREAD_VARIABLES}
