#!/usr/bin/env python3
"""
Batch job: run every verification suite plus the Fock and Wyler reports.
Suites run concurrently in worker threads; each report is written atomically.
"""
import os
import sys
import asyncio
import logging
from datetime import datetime
from typing import Any, Dict, List
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from dotenv import load_dotenv
load_dotenv()

from app.config import RunConfig, load_run_config
from app.errors import ConfigError, DimensionError
from app.reports import REPORT_KINDS, write_csv, write_json_report
from app.suites import VERIFY_TARGETS, SuiteResult, run_fock, run_wyler

logger = logging.getLogger(__name__)

LOG_FILE_NAME = "verification_suite.log"

ALL_SUITES = list(VERIFY_TARGETS) + ["fock", "wyler"]


def configure_logging(log_dir: Path) -> Path:
    """Append to log_dir/verification_suite.log and echo to stdout; returns the log file."""
    log_dir = Path(log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    log_file = log_dir / LOG_FILE_NAME
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(log_file, mode='a'),
            logging.StreamHandler(sys.stdout)
        ],
        force=True,
    )
    return log_file


class VerificationRunner:
    """Runs a list of suites against one RunConfig and tallies the outcome."""

    def __init__(self, config: RunConfig, suites: List[str]):
        self.config = config
        self.suites = suites

    def _run(self, name: str) -> SuiteResult:
        if name == "fock":
            return run_fock(self.config)
        if name == "wyler":
            return run_wyler(self.config)
        return VERIFY_TARGETS[name](self.config)

    def run_suite(self, name: str) -> Dict[str, Any]:
        """Run one suite and persist its report; never raises."""
        try:
            result = self._run(name)
            for table, frame in result.tables.items():
                write_csv(self.config.out_dir / f"{result.suite}_{table}.csv", frame)
            path = write_json_report(self.config.out_dir / f"{result.suite}.json", result.report(self.config),
                                     command=f"run_verification_suite {name}",
                                     kind=REPORT_KINDS[result.suite])
            status = 'passed' if result.passed else 'failed'
            return {'suite': name, 'status': status, 'report': str(path), 'failures': result.failures}
        except (ConfigError, DimensionError) as e:
            logger.warning(f"⏭️  Skipped {name}: {e}")
            return {'suite': name, 'status': 'skipped', 'message': str(e)}
        except Exception as e:
            logger.exception(f"❌ Error running {name}: {e}")
            return {'suite': name, 'status': 'error', 'message': str(e)}

    async def run_all(self) -> List[Dict[str, Any]]:
        job_start_time = datetime.now()
        print(f"\n{'='*80}")
        print(f"🚀 Verification Job Started - {job_start_time.strftime('%Y-%m-%d %H:%M:%S')}")
        print(f"{'='*80}")
        logger.info(f"🚀 Verification job started: suites={', '.join(self.suites)} n={self.config.n} "
                    f"seed={self.config.seed}")

        results = await asyncio.gather(*(asyncio.to_thread(self.run_suite, name) for name in self.suites))

        counts = {'passed': 0, 'failed': 0, 'skipped': 0, 'error': 0}
        for result in results:
            counts[result['status']] += 1
            if result['status'] == 'failed':
                for failure in result['failures']:
                    print(f"   ❌ {result['suite']}: {failure['check']} {failure['detail']}")

        duration = (datetime.now() - job_start_time).total_seconds()
        logger.info(f"\n📊 Job Summary:")
        logger.info(f"   ✅ Passed: {counts['passed']}")
        logger.info(f"   ❌ Failed: {counts['failed']}")
        logger.info(f"   ⏭️  Skipped: {counts['skipped']}")
        logger.info(f"   💥 Errors: {counts['error']}")
        logger.info(f"   ⏱️  Duration: {duration:.1f} seconds")

        print(f"\n{'='*80}")
        print(f"✅ Job Completed - {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
        print(f"{'='*80}\n")
        return results


def main():
    """Main entry point. SPINORLAB_SUITES narrows the run to a comma-separated list."""
    requested = os.getenv('SPINORLAB_SUITES')
    suites = [s.strip() for s in requested.split(',')] if requested else ALL_SUITES
    unknown = [s for s in suites if s not in ALL_SUITES]
    if unknown:
        print(f"❌ Unknown suite(s): {', '.join(unknown)}; choose from {', '.join(ALL_SUITES)}")
        sys.exit(2)

    try:
        config = load_run_config(os.getenv('SPINORLAB_CONFIG_FILE'))
    except ConfigError as e:
        print(f"❌ {e}")
        sys.exit(2)

    log_file = configure_logging(config.log_dir)
    logger.info(f"Logging to {log_file}")
    results = asyncio.run(VerificationRunner(config, suites).run_all())
    statuses = {r['status'] for r in results}
    if 'error' in statuses:
        sys.exit(3)
    if 'failed' in statuses:
        sys.exit(1)


if __name__ == '__main__':
    main()
