import os

from dotenv import load_dotenv

load_dotenv()

# Worker count used when --threads is not given on the command line.
# Parsed by the --threads option, so a bad value is a usage error (exit 2).
# Results never depend on it; it only changes wall-clock time.
DEFAULT_THREADS = os.getenv("EXTREMO_THREADS", "1")

# Root log level for the command-line front end (DEBUG, INFO, WARNING, ...)
LOG_LEVEL = os.getenv("EXTREMO_LOG_LEVEL", "WARNING")

# Margins
MIN_GEV_SAMPLE = 20  # minimum number of observations (and distinct values) for a PWM fit
XI_MIN = -0.5  # lower clamp of the fitted shape
XI_MAX = 0.95  # upper clamp; the madogram needs Gamma(1 - xi) finite

# Diagonal Stieltjes integration of the copula madogram
MADOGRAM_CELLS = 10_000
MADOGRAM_EPS = 1e-6

# Tensor quadrature of the copula covariogram
COVARIOGRAM_NODES = 200
COVARIOGRAM_EPS = 1e-6

# Gaussian copula cdf accuracy target
GAUSSIAN_CDF_EPSABS = 1e-12
GAUSSIAN_CDF_EPSREL = 1e-10

# Probe schedules for limits (u -> 1 for upper tails, u -> 0 for lower tails)
UPPER_PROBES = tuple(1.0 - 10.0 ** -k for k in range(2, 7))
LOWER_PROBES = tuple(10.0 ** -k for k in range(2, 7))
THETA_PROBES = (0.5, 0.9, 0.99)
EXTREMAL_SPREAD_TOL = 1e-8  # probe spread above this flags a non-extremal copula

# Tail dependence
MIN_EXCEEDANCES = 5
ETA_FLOOR = 1e-6  # eta_hat is clamped into [ETA_FLOOR, 1]

# Simulation
SIM_BLOCK_SIZE = 1024  # replications drawn per independent seed stream
SMITH_STORM_BATCH = 64  # storms drawn per vectorised step
SMITH_DEFAULT_RADIUS = 4.0  # truncation radius in storm-scale units
SIM_MARGIN_TOLERANCE = 0.05
