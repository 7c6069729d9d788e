import math

from pydantic import model_validator

from app.schemas.base_schemas import TunedModel


class DomainConstants(TunedModel):

    beta_lo: float = 1.1
    beta_mid: float = 1.9
    beta_hi: float = 2.9

    @property
    def log_ratio(self) -> float:
        return math.log(self.beta_hi / self.beta_lo)

    @model_validator(mode='after')
    def ordered(self) -> 'DomainConstants':
        if not self.beta_lo < self.beta_mid < self.beta_hi:
            raise ValueError('beta_lo < beta_mid < beta_hi violated')
        return self


class RBreakpoints(TunedModel):

    a1: float
    a2: float

    @model_validator(mode='after')
    def ordered(self) -> 'RBreakpoints':
        if not 0 < self.a1 < self.a2 < 1.9:
            raise ValueError('0 < a1 < a2 < 1.9 violated')
        return self


class DBar(TunedModel):

    value: float

    @model_validator(mode='after')
    def in_range(self) -> 'DBar':
        if not 0.023 < self.value < 0.024:
            raise ValueError(f'dbar {self.value} outside (0.023, 0.024)')
        return self


class RTableRow(TunedModel):

    x: float
    r: float


class ConstantsReport(TunedModel):

    beta_lo: float
    beta_mid: float
    beta_hi: float
    log_ratio: float
    a1: float
    a2: float
    dbar: float
    dbar_quadrature: float
    r_table: list[RTableRow]
