from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from dotenv import load_dotenv

load_dotenv()

class Settings(BaseSettings):
    jobs: int = Field(1, description="Worker processes for sharded searches")
    tolerance: float = Field(1e-9, description="Relative tolerance for floating-point outputs")

    search_budget: int = Field(2_000_000, description="Node budget of the reconstruction oracle")
    certificate_budget: int = Field(10_000, description="Candidate polynomials tried per double coset")
    generic_probes: int = Field(3, description="Random generic configurations used as membership probes")
    mining_budget: int = Field(5_000_000, description="Upper bound on enumerated grid subsets")
    probe_levels: int = Field(4, description="Noise decades tested by the local probe")

    random_seed: int = Field(20240229, description="Seed for every randomized routine")
    log_level: str = Field("INFO", description="Logging level used by the command line")

    model_config = SettingsConfigDict(
        env_prefix="POINTSPECTRA_",
        env_file=".env",
        env_file_encoding="utf-8",
    )

settings = Settings()
