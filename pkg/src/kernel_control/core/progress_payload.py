from typing import Any, TypedDict


class ProgressPayloadBase(TypedDict):
    stage: str
    step: int
    total_steps: int
    percent: int


class ProgressPayload(ProgressPayloadBase, total=False):
    artifacts: dict[str, Any]
    files: list[str]
