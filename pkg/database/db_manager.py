import sqlite3
import logging
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, Optional, Union
from pathlib import Path

import pandas as pd

from utils.config import BENCH_CONFIG, DB_CONFIG

logger = logging.getLogger(__name__)

DB_PATH = Path(__file__).parent.parent / DB_CONFIG["default_path"]

RESULT_COLUMNS = BENCH_CONFIG["columns"]


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _plain(value: Any) -> Any:
    """sqlite-bindable scalar; NaN becomes NULL."""
    if value is None or pd.isna(value):
        return None
    return value.item() if hasattr(value, "item") else value


class ResultsDB:
    def __init__(self, db_path: Union[str, Path] = DB_PATH):
        self.db_path = Path(db_path)
        self._init_db()

    def _get_conn(self):
        self.db_path.parent.mkdir(parents=True, exist_ok=True)
        return sqlite3.connect(str(self.db_path))

    def _init_db(self):
        conn = self._get_conn()
        cur = conn.cursor()

        # Bench Run Log Table
        cur.execute("""
            CREATE TABLE IF NOT EXISTS bench_runs (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                corpus TEXT,
                algorithms TEXT,
                seeds TEXT,
                start_time TIMESTAMP,
                end_time TIMESTAMP,
                rows_written INTEGER,
                failures INTEGER,
                status TEXT,
                error_message TEXT
            )
        """)

        # Results Table (one row per instance, algorithm and seed)
        cur.execute("""
            CREATE TABLE IF NOT EXISTS bench_results (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                run_id INTEGER,
                instance_id TEXT,
                family TEXT,
                n INTEGER,
                algorithm TEXT,
                seed INTEGER,
                weight REAL,
                lp_value REAL,
                oracle_value REAL,
                ratio_to_lp REAL,
                ratio_to_oracle REAL,
                time_ms REAL,
                status TEXT,
                FOREIGN KEY(run_id) REFERENCES bench_runs(id)
            )
        """)

        conn.commit()
        conn.close()

    def start_bench_log(self, corpus: str, algorithms: Iterable[str], seeds: Iterable[int]) -> int:
        conn = self._get_conn()
        cur = conn.cursor()
        cur.execute("""
            INSERT INTO bench_runs (corpus, algorithms, seeds, start_time, status)
            VALUES (?, ?, ?, ?, 'running')
        """, (corpus, ",".join(algorithms), ",".join(str(s) for s in seeds), _now()))
        run_id = cur.lastrowid
        conn.commit()
        conn.close()
        return run_id

    def update_bench_log(self, run_id: int, **kwargs):
        conn = self._get_conn()
        cur = conn.cursor()

        fields = []
        values = []
        for k, v in kwargs.items():
            fields.append(f"{k} = ?")
            values.append(v)

        values.append(_now())  # End time
        values.append(run_id)

        cur.execute(f"""
            UPDATE bench_runs
            SET {', '.join(fields)}, end_time = ?
            WHERE id = ?
        """, tuple(values))
        conn.commit()
        conn.close()

    def add_results(self, run_id: int, rows: pd.DataFrame) -> int:
        """Insert report rows; the summary rows are not stored."""
        trials = rows[rows["instance_id"] != "summary"]
        records = [
            (run_id, *[_plain(v) for v in record])
            for record in trials[RESULT_COLUMNS].itertuples(index=False, name=None)
        ]
        conn = self._get_conn()
        cur = conn.cursor()
        try:
            cur.executemany(f"""
                INSERT INTO bench_results (run_id, {', '.join(RESULT_COLUMNS)})
                VALUES ({', '.join('?' * (len(RESULT_COLUMNS) + 1))})
            """, records)
            conn.commit()
            return len(records)
        except Exception as e:
            logger.error(f"DB Error: {e}")
            conn.rollback()
            return 0
        finally:
            conn.close()

    def get_results(self, run_id: Optional[int] = None) -> pd.DataFrame:
        conn = self._get_conn()
        try:
            query = f"SELECT run_id, {', '.join(RESULT_COLUMNS)} FROM bench_results"
            if run_id is None:
                return pd.read_sql_query(query, conn)
            return pd.read_sql_query(query + " WHERE run_id = ?", conn, params=(run_id,))
        finally:
            conn.close()

    def get_bench_stats(self) -> Dict[str, Any]:
        """Get statistics about stored bench runs."""
        conn = self._get_conn()
        cur = conn.cursor()

        stats = {
            "total_runs": 0,
            "total_results": 0,
            "failures": 0,
            "by_algorithm": {},
            "by_family": {},
        }

        try:
            cur.execute("SELECT COUNT(*) FROM bench_runs")
            stats["total_runs"] = cur.fetchone()[0]

            cur.execute("SELECT COUNT(*) FROM bench_results")
            stats["total_results"] = cur.fetchone()[0]

            cur.execute("SELECT COUNT(*) FROM bench_results WHERE status != 'ok'")
            stats["failures"] = cur.fetchone()[0]

            # Mean ratio per algorithm
            cur.execute("""
                SELECT algorithm, COUNT(*), AVG(ratio_to_lp), AVG(ratio_to_oracle)
                FROM bench_results WHERE status = 'ok' GROUP BY algorithm ORDER BY algorithm
            """)
            for algorithm, count, to_lp, to_oracle in cur.fetchall():
                stats["by_algorithm"][algorithm] = {
                    "count": count,
                    "mean_ratio_to_lp": to_lp,
                    "mean_ratio_to_oracle": to_oracle,
                }

            cur.execute("SELECT family, COUNT(*) FROM bench_results GROUP BY family ORDER BY family")
            for family, count in cur.fetchall():
                stats["by_family"][family] = count

        except Exception as e:
            logger.error(f"Error getting stats: {e}")
        finally:
            conn.close()

        return stats


def get_db(db_path: Optional[Union[str, Path]] = None) -> ResultsDB:
    return ResultsDB(db_path or DB_PATH)
