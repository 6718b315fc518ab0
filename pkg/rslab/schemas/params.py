from pydantic import BaseModel, Field, ConfigDict

class ModelParams(BaseModel):
    """Inverse temperature and external field of the SK model"""
    model_config = ConfigDict(frozen=True)

    beta: float = Field(..., ge=0, allow_inf_nan=False)
    h: float = Field(..., ge=0, allow_inf_nan=False)

class ReducedSetSpec(BaseModel):
    """Radius and depth of the restricted configuration set"""
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(..., gt=0, allow_inf_nan=False)
    k: int = Field(..., ge=1)

    @property
    def radius(self) -> float:
        return self.epsilon / self.k
