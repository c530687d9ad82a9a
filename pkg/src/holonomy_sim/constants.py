"""Numerical tolerances shared by the library and the test-suite."""

MAX_DIM = 25
MAX_KRON_DIM = 625

NORM_TOL = 1e-10
HERMITIAN_TOL = 1e-10
UNITARY_TOL = 1e-9
TRACE_TOL = 1e-9
POSITIVITY_FLOOR = -1e-9

# evolve_lindblad refuses results whose trace wandered further than this
TRACE_DRIFT_FAIL = 1e-6

# infidelities below this are treated as numerical floor in order fits
INFIDELITY_FLOOR = 1e-12

# default steps: Lambda-system runs in units of 1/Omega, transmon runs use
# this many samples per period of the fastest retained oscillation
LAMBDA_STEP_FRACTION = 200
TRANSMON_SAMPLES_PER_PERIOD = 40

TWO_PI = 6.283185307179586
