"""Run reports and search result documents."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Any, Dict, List, Optional, Union

from .family_io import family_document
from .inequalities import VIOLATED
from .search import SearchResult
from .utils import dump_yaml

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_ERROR = 2


@dataclass
class RunReport:
    """
    Everything a CLI command produced, serialized as a key-sorted YAML document.

    Args:
        command: argv echo
        input_digest (str): SHA-256 of the input family, when there is one
        results: per-check results (means, margins, verdicts, flags)
        tolerances: tolerances in effect
        seed (int): seed in effect for randomized commands
        wall_time (float): seconds spent in the command
        verdict (str): holds, equality or violated
    """
    command: List[str]
    input_digest: Optional[str] = None
    results: Dict[str, Any] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: Optional[int] = None
    wall_time: float = 0.0
    verdict: str = 'holds'

    @property
    def exit_status(self) -> int:
        return EXIT_VIOLATED if self.verdict == VIOLATED else EXIT_OK

    def to_document(self) -> Dict[str, Any]:
        return {
            'command': list(self.command),
            'input_digest': self.input_digest,
            'results': self.results,
            'tolerances': self.tolerances,
            'seed': self.seed,
            'wall_time': self.wall_time,
            'verdict': self.verdict,
        }

    def dump(self, stream: Optional[IO[str]] = None) -> Optional[str]:
        return dump_yaml(self.to_document(), stream)

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as fh:
            self.dump(fh)
        logger.info("Report written to %s", path)
        return path


def search_result_document(result: SearchResult) -> Dict[str, Any]:
    """Document holding the best margin, the replayable witness and the restart ledger."""
    return {
        'target': result.target.to_dict(),
        'best_margin': result.best_margin,
        'violated': result.violated,
        'seed': result.seed,
        'evaluations': result.evaluations,
        'witness': family_document(result.witness) if result.witness is not None else None,
        'trace': [vars(record) for record in result.trace],
    }
