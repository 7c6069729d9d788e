from pathlib import Path
from typing import Any

from pydantic import Field, field_validator, model_validator

import settings
from app.schemas.base_schemas import TunedModel

BUILTIN_PROFILES = ('desk', 'paper')


class ProfileConstants(TunedModel):
    """
    Every numeric constant of the construction. "paper" carries the values
    the existence argument needs (feasible only at astronomical degree),
    "desk" is tuned for graphs with minimum degree in the hundreds.
    """

    name: str = 'desk'
    p_U: float = 0.5
    eps_U: float = 0.1
    p_FW: float = 0.9
    eps_FW: float = 0.1
    m_levels: int = 8
    eps_FU: float = 0.3
    frac_NU: float = 1.0
    eps_loc: float = 0.22
    eps_len: float = 0.24
    frac_I: float = 1.5
    modulus_M: int = 10
    reserved_residues: tuple[int, int] = (0, 1)
    min_delta_ratio: float = 30.0
    strict_bounds: bool = Field(
        default=False,
        description='treat the U-sum range and J(u) checks as errors'
    )

    @field_validator('p_U', 'p_FW')
    @classmethod
    def probability(cls, value: float) -> float:
        if not 0 < value < 1:
            raise ValueError('probabilities must lie in (0, 1)')
        return value

    @field_validator('eps_U', 'eps_FW', 'eps_FU', 'frac_NU', 'eps_loc',
                     'eps_len', 'frac_I', 'min_delta_ratio')
    @classmethod
    def positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError('tolerances must be positive')
        return value

    @model_validator(mode='after')
    def consistent(self) -> 'ProfileConstants':
        if self.eps_U >= self.p_U:
            raise ValueError('eps_U must be smaller than p_U')
        if self.m_levels < 2:
            raise ValueError('m_levels must be at least 2')
        if self.modulus_M < 4:
            raise ValueError('modulus_M must be at least 4')
        low, high = sorted(r % self.modulus_M for r in self.reserved_residues)
        if high != low + 1:
            raise ValueError('reserved residues must be two consecutive '
                             'classes')
        return self

    @property
    def pair_residue(self) -> int:
        """Residue of the smaller element of every U-sum pair."""
        return min(r % self.modulus_M for r in self.reserved_residues)

    def is_reserved(self, value: int) -> bool:
        residues = {r % self.modulus_M for r in self.reserved_residues}
        return value % self.modulus_M in residues

    @classmethod
    def paper(cls) -> 'ProfileConstants':
        return cls(name='paper', p_U=1e-4, eps_U=1e-6, p_FW=1e-4,
                   eps_FW=1e-6, m_levels=1000, eps_FU=1e-5, frac_NU=2e-3,
                   eps_loc=1e-9, eps_len=1e-9, frac_I=0.95, modulus_M=100,
                   min_delta_ratio=1e20, strict_bounds=True)

    @classmethod
    def desk(cls) -> 'ProfileConstants':
        return cls()

    @classmethod
    def builtin(cls, name: str) -> 'ProfileConstants':
        if name == 'paper':
            return cls.paper()
        if name == 'desk':
            return cls.desk()
        raise ValueError(f'unknown profile {name!r}')

    @classmethod
    def load(cls, path: str | Path | None = None,
             overrides: dict[str, Any] | None = None) -> 'ProfileConstants':
        """
        Resolves a profile: overrides win over the file, the file wins
        over the built-in desk profile; "desk" and "paper" name the
        built-in profiles instead of a file
        """
        path = path or settings.WEIGHTING_PROFILE_PATH
        if path in BUILTIN_PROFILES:
            values = cls.builtin(str(path)).model_dump()
        else:
            values = cls.desk().model_dump()
            if path:
                values.update(cls.model_validate_json(
                    Path(path).read_text()).model_dump(exclude_unset=True))
        values.update(overrides or {})
        return cls.model_validate(values)


class StageBudget(TunedModel):

    partition_rounds: int = settings.PARTITION_MAX_ROUNDS
    partition_retries: int = settings.PARTITION_GLOBAL_RETRIES
    w_stage_rounds: int = settings.W_STAGE_MAX_ROUNDS
    w_stage_reruns: int = 1
    pipeline_restarts: int = settings.PIPELINE_RESTARTS
