"""
Experiment harness: run every (instance, algorithm, seed) trial, gather one
report row per trial, sort canonically and append per-algorithm summaries.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import pandas as pd

from utils.config import BENCH_CONFIG
from src.models import Instance
from solvers import SolveParams, get_solver

logger = logging.getLogger(__name__)

COLUMNS = BENCH_CONFIG["columns"]


def run_trial(instance_id: str, instance: Instance, algorithm: str, seed: int,
              params: SolveParams) -> Dict[str, Any]:
    """One report row; failures become a row whose status is the exception name."""
    row: Dict[str, Any] = {
        "instance_id": instance_id,
        "family": instance.family.kind.value,
        "n": instance.n,
        "algorithm": algorithm,
        "seed": seed,
    }
    try:
        report = get_solver(algorithm, replace(params, seed=seed)).solve(instance)
        row.update({
            "weight": report.weight,
            "lp_value": report.lp_value,
            "oracle_value": report.oracle_value,
            "ratio_to_lp": report.ratio_to_lp,
            "ratio_to_oracle": report.ratio_to_oracle,
            "time_ms": report.time_ms,
            "status": "truncated" if report.truncated else "ok",
        })
    except Exception as e:
        logger.error(f"Trial {instance_id}/{algorithm}/seed={seed} failed: {e}")
        row["status"] = type(e).__name__
    return row


def summarize(rows: pd.DataFrame) -> pd.DataFrame:
    """Per-algorithm means over successful rows, tagged instance_id='summary'."""
    summaries = []
    for algorithm, group in rows.groupby("algorithm", sort=True):
        ok = group[group["status"] == "ok"]
        summary = {column: None for column in COLUMNS}
        summary.update({
            "instance_id": "summary",
            "algorithm": algorithm,
            "status": f"ok={len(ok)}/{len(group)}",
        })
        for column in ("weight", "lp_value", "oracle_value", "ratio_to_lp", "ratio_to_oracle", "time_ms"):
            values = pd.to_numeric(ok[column], errors="coerce").dropna()
            summary[column] = float(values.mean()) if len(values) else None
        summaries.append(summary)
    return pd.DataFrame(summaries, columns=COLUMNS)


def bench(corpus: Sequence[Tuple[str, Instance]], algorithms: Sequence[str], seeds: Sequence[int],
          params: Optional[SolveParams] = None, workers: int = BENCH_CONFIG["workers"]) -> pd.DataFrame:
    """
    Run the full trial grid. Rows are sorted by (instance_id, algorithm, seed)
    so the report does not depend on the worker count.
    """
    params = params or SolveParams()
    tasks = [(iid, inst, alg, seed) for iid, inst in corpus for alg in algorithms for seed in seeds]
    logger.info(f"Bench: {len(corpus)} instances x {len(algorithms)} algorithms x {len(seeds)} seeds = {len(tasks)} trials")

    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda task: run_trial(*task, params), tasks))
    else:
        rows = [run_trial(*task, params) for task in tasks]

    rows.sort(key=lambda r: (r["instance_id"], r["algorithm"], r["seed"]))
    report = pd.DataFrame(rows, columns=COLUMNS)
    if not report.empty:
        report = pd.concat([report, summarize(report)], ignore_index=True)
    for column in ("n", "seed"):
        report[column] = report[column].astype("Int64")

    logger.info(f"Bench finished: {len(rows)} rows, {failure_count(report)} failures")
    return report


def write_report(report: pd.DataFrame, path: Union[str, Path, None] = None) -> str:
    """CSV text of the report; also written to path when given."""
    text = report.to_csv(index=False)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info(f"Wrote {len(report)} rows to {path}")
    return text


def without_timing(report: pd.DataFrame) -> pd.DataFrame:
    return report.drop(columns=BENCH_CONFIG["timing_columns"])


def failure_count(report: pd.DataFrame) -> int:
    trials = report[report["instance_id"] != "summary"]
    return int((~trials["status"].isin(["ok", "truncated"])).sum())
