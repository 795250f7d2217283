from .artifact_storage import ArtifactStorage
from .local_artifact_storage import LocalArtifactStorage

__all__ = ["ArtifactStorage", "LocalArtifactStorage"]
