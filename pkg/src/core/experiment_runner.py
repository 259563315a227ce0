"""
Experiment runner for iOCR
Looks experiments up in the registry and captures failures as result dicts
"""
import logging
from pathlib import Path
from typing import Any, Dict

from config.config import VERSION

from .corpus import write_json, write_text
from .errors import IOCRError
from .experiments import EXPERIMENTS, ExperimentContext, format_summary

logger = logging.getLogger(__name__)


class ExperimentRunner:
    """
    Runs numbered experiments and writes their summaries
    Every outcome is a dict with 'success' and 'output' keys
    """

    def __init__(self, context: ExperimentContext):
        self.context = context
        self.functions = dict(EXPERIMENTS)
        logger.info(f"ExperimentRunner initialized with output directory {context.out_dir}")

    def run(self, number: int) -> Dict[str, Any]:
        """Run one experiment; never raises for data errors"""
        if number not in self.functions:
            return {
                'success': False,
                'accepted': False,
                'output': f"Experiment '{number}' not found. Available experiments: "
                          f"{', '.join(str(n) for n in sorted(self.functions))}"
            }

        out_dir = Path(self.context.out_dir)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            logger.info(f"Running experiment {number} with seed {self.context.seed}")
            summary = self.functions[number](self.context)
            summary = {**summary, "seed": self.context.seed, "version": VERSION}
            text = format_summary(summary)
            write_json(out_dir / "summary.json", summary)
            write_text(out_dir / "summary.txt", text)
            logger.info(f"Experiment {number} {'accepted' if summary['accepted'] else 'NOT accepted'}")
            return {
                'success': True,
                'accepted': bool(summary['accepted']),
                'output': text,
                'summary': summary,
            }

        except IOCRError as e:
            logger.error(f"Experiment {number} failed: {e}")
            return {
                'success': False,
                'accepted': False,
                'output': f"Experiment {number} failed: {e}"
            }
        except OSError as e:
            logger.error(f"Experiment {number} could not write its artifacts: {e}")
            return {
                'success': False,
                'accepted': False,
                'output': f"Experiment {number} could not write to {out_dir}: {e}"
            }
