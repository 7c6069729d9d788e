from pydantic import BaseModel, ConfigDict


class TunedModel(BaseModel):

    model_config = ConfigDict(from_attributes=True)


class ArrayModel(BaseModel):
    """Base for models carrying numpy arrays indexed by vertex or edge id."""

    model_config = ConfigDict(arbitrary_types_allowed=True,
                              from_attributes=True)
