"""File sink: the columnar report next to the other artifacts."""

import logging

from ..models import RunReport
from ..persistence.artifact_store import ArtifactStore, ArtifactStoreError

logger = logging.getLogger(__name__)


class FileSink:
    """Writes <scenario>_report.tsv through an artifact store."""

    def __init__(self, store: ArtifactStore):
        self._store = store

    def send(self, report: RunReport) -> bool:
        try:
            self._store.write_report(report)
            return True
        except ArtifactStoreError as e:
            logger.error("Failed to write report for %s: %s", report.scenario_name, e)
            return False
