from os import environ

import psutil
from dotenv import load_dotenv

load_dotenv()

# Logging
LOG_LEVEL = environ.get("LURYE_OZF_LOG", "INFO").upper()
TIMEZONE = environ.get("LURYE_OZF_TZ", "UTC")

# Run defaults (overridden by the config file, then by CLI flags)
SEED = int(environ.get("LURYE_OZF_SEED", "0"))
JOBS = int(environ.get("LURYE_OZF_JOBS", str(psutil.cpu_count(logical=False) or 1)))
OUT_DIR = environ.get("LURYE_OZF_OUT", "reports")

# Numerical defaults
EPS_FREQ = float(environ.get("LURYE_OZF_EPS_FREQ", "1e-6"))
ENUM_CAP = int(float(environ.get("LURYE_OZF_ENUM_CAP", "1e6")))
MAX_ITER = int(environ.get("LURYE_OZF_MAX_ITER", "500"))
