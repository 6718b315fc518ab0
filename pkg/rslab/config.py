from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional

class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="RSLAB_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging settings
    log_level: str = "INFO"
    log_json: bool = True
    log_file: Optional[str] = None

    # Quadrature settings
    quad_order: int = 161
    quad_check_tolerance: float = 1e-11
    phase_quad_order: int = 161

    # Fixed-point solver settings
    q_tolerance: float = 1e-14
    q_damping: float = 0.5
    q_max_damped_iterations: int = 500
    q_max_bisection_iterations: int = 200

    # State evolution
    se_gap_floor: float = 1e-13

    # TAP construction
    gram_schmidt_tolerance: float = 1e-10
    max_disorder_size: int = 10000

    # Enumeration caps
    max_enumeration_size: int = 24
    max_pair_enumeration_size: int = 14
    max_pipeline_size: int = 20
    field_refresh_interval: int = 1024  # flips between full recomputations
    field_drift_tolerance: float = 1e-10

    # Monte Carlo settings
    mc_samples: int = 20000
    mc_batch_size: int = 1000
    mc_sigma_gate: float = 3.0

    # Experiment settings
    disorder_samples: int = 200
    threads: int = 1

    # Phase diagram settings
    phase_beta_max: float = 10.0
    phase_tolerance: float = 1e-10

# Global settings instance
settings = Settings()
