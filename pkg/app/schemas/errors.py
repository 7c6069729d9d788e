from typing import Any

from pydantic import BaseModel


class ErrorResponseSchema(BaseModel):

    error: str
    detail: str
    stage: str | None = None
    context: dict[str, Any] = {}
