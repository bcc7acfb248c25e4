"""Constants shared by the verification suites."""

REPORT_SCHEMA_VERSION: int = 1
DEFAULT_SEED: int = 42
SEED_ENV_VAR: str = "FROBFORGE_SEED"
OUTPUT_DIR_ENV_VAR: str = "FROBFORGE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR: str = "./reports"
REPORT_FORMATS: tuple[str, ...] = ("json", "json+csv")
FLOAT_FORMAT: str = "%.12e"

# hessian_core
FD_STEP: float = 1e-3
SINGULAR_EIGENVALUE: float = 1e-12
STRUCTURAL_TOL: float = 1e-10
ORACLE_TOL: float = 1e-5
FD_PIPELINE_TOL: float = 1e-4
CURVATURE_SYMMETRY_TOL: float = 1e-8
AFFINE_TOL: float = 1e-8
FLAT_TOL: float = 1e-8
WDVV_TOL: float = 1e-7
# Rm(X, Y, Z, W) = g(R(X, Y)Z, W) equals this multiple of curvature_from_A.
CURVATURE_SCALE: float = -0.25

# cone_models
CONE_EIGENVALUE_RATIO: float = 1e-10
SECTIONAL_TOL: float = 1e-9
DEGENERATE_PLANE: float = 1e-12
JORDAN_TOL: float = 1e-12
LIE_TRIPLE_TOL: float = 1e-10
BRACKET_TOL: float = 1e-6
GAUSS_TOL: float = 1e-5
GEODESY_TOL: float = 1e-10
GEODESIC_RK4_TOL: float = 1e-6
EMBEDDING_TOL: float = 1e-13
FLAT_LOCUS_SAMPLES: int = 20
RANDOM_PLANES: int = 100
JORDAN_TRIPLES: int = 200

# transport
MA_MAX_ITER: int = 200
MA_TOL: float = 1e-11
MA_RELATIVE_RESIDUAL: float = 1e-6
MA_EXACT_TOL: float = 1e-8
CONVEXITY_SLACK: float = -1e-8
SINKHORN_EPSILON: float = 1e-3
SINKHORN_MAX_ITER: int = 200_000
SINKHORN_STOP: float = 1e-9
MARGINAL_TOL_SINKHORN: float = 1e-7
MARGINAL_TOL_LP: float = 1e-12
MASS_TOL: float = 1e-9
LP_MAX_SUPPORT: int = 1000
CAFFARELLI_TOL: float = 0.05
INTERPOLATION_RMS: float = 0.05
LP_VS_SINKHORN_TOL: float = 1e-4
LINEAR_MAP_RMS: float = 0.03
CONVERGENCE_RATIO: tuple[float, float] = (3.5, 4.5)
BRUTE_FORCE_MAX: int = 7

# kvn
MAX_SUBSTEP: float = 0.01
CFL_CELLS: float = 2.0
NORM_TOL: float = 1e-6
INNER_TOL: float = 1e-5
HARMONIC_TOL: float = 1e-12
TORUS_TOL: float = 1e-15
COMMUTATION_TOL: float = 1e-5
HARMONIC_RETURN_TOL: float = 1e-9
PENDULUM_NORM_TOL: float = 1e-5
PARTIALS_TOL: float = 1e-6
MIRROR_COST_TOL: float = 1e-6
MIRROR_MARGINAL_TOL: float = 1e-7
ROOT_TOL: float = 1e-10
ROOT_RETRIES: int = 50
HISTOGRAM_BINS: int = 32
INTERPOLATION_TIMES: tuple[float, ...] = (0.0, 0.25, 0.5, 0.75, 1.0)

# Boolean checks pass iff residual 0 <= tolerance 0.5 < residual 1.
BOOLEAN_TOL: float = 0.5
