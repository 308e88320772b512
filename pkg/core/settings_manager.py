"""
Settings and database management for the Bogoliubov toolkit.
Handles SQLite storage for numeric defaults, named sequence templates and cached sweep results.
"""

import sqlite3
import logging
import json
import time
from pathlib import Path
from typing import Optional, Dict, List, Any, Union

from cryptography.hazmat.primitives import hashes

from core.errors import ParseError

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS = {
    'tol': '1e-10',
    'cutoff': '40',
    'sectors': '10',
    'radius': '10',
    'steps': '1024',
    'horizon': '1000000',
    'family_horizon': '20000',
    'threads': '1',
    'output_format': 'json',
    'cache_max_age': '86400',
}


def fingerprint(params: Dict[str, Any]) -> str:
    """SHA-256 hex digest of a parameter dict in canonical JSON form."""
    digest = hashes.Hash(hashes.SHA256())
    digest.update(json.dumps(params, sort_keys=True, default=str).encode("utf-8"))
    return digest.finalize().hex()


class SettingsManager:
    """Manages toolkit settings and persistent data storage."""

    def __init__(self, db_path: str = "bogoliubov_toolkit.db"):
        """Initialize the settings manager with a database path (':memory:' allowed)."""
        self.db_path = db_path
        self.conn: Optional[sqlite3.Connection] = None
        self._init_database()

    def _init_database(self):
        """Create the tables and seed the defaults."""
        self.conn = sqlite3.connect(self.db_path, check_same_thread=False)
        self.conn.row_factory = sqlite3.Row
        cursor = self.conn.cursor()

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS settings (
                key TEXT PRIMARY KEY,
                value TEXT NOT NULL
            )
        """)

        # Sequence templates, the JSON spec {kind, expr | values, tail}
        cursor.execute("""
            CREATE TABLE IF NOT EXISTS sequences (
                id INTEGER PRIMARY KEY AUTOINCREMENT,
                name TEXT NOT NULL UNIQUE,
                spec_json TEXT NOT NULL,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        """)

        cursor.execute("""
            CREATE TABLE IF NOT EXISTS sweep_cache (
                fingerprint TEXT PRIMARY KEY,
                rows_json TEXT NOT NULL,
                timestamp REAL NOT NULL,
                created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
            )
        """)

        for key, value in DEFAULT_SETTINGS.items():
            cursor.execute("""
                INSERT OR IGNORE INTO settings (key, value) VALUES (?, ?)
            """, (key, value))

        self.conn.commit()
        logger.info(f"Database initialized at {self.db_path}")

    def get_setting(self, key: str, default: Optional[str] = None) -> Optional[str]:
        """Get a setting value by key."""
        if self.conn is None:
            return default
        try:
            cursor = self.conn.cursor()
            cursor.execute("SELECT value FROM settings WHERE key = ?", (key,))
            row = cursor.fetchone()
            return row[0] if row else default
        except sqlite3.Error:
            return default

    def set_setting(self, key: str, value: Any):
        """Set a setting value."""
        cursor = self.conn.cursor()
        cursor.execute("""
            INSERT OR REPLACE INTO settings (key, value) VALUES (?, ?)
        """, (key, str(value)))
        self.conn.commit()

    def get_float(self, key: str, default: Optional[float] = None) -> Optional[float]:
        value = self.get_setting(key)
        if value is None:
            return default
        try:
            return float(value)
        except ValueError:
            logger.warning(f"Setting '{key}' = '{value}' is not a number; using {default}")
            return default

    def get_int(self, key: str, default: Optional[int] = None) -> Optional[int]:
        value = self.get_float(key)
        return default if value is None else int(value)

    def get_sequences(self) -> List[Dict[str, Any]]:
        """Get all stored sequence templates."""
        cursor = self.conn.cursor()
        cursor.execute("SELECT name, spec_json FROM sequences ORDER BY name")
        return [{'name': row['name'], 'spec': json.loads(row['spec_json'])}
                for row in cursor.fetchall()]

    def add_sequence(self, name: str, spec: Dict[str, Any]):
        """Add or update a sequence template."""
        cursor = self.conn.cursor()
        cursor.execute("""
            INSERT OR REPLACE INTO sequences (name, spec_json)
            VALUES (?, ?)
        """, (name, json.dumps(spec)))
        self.conn.commit()

    def delete_sequence(self, name: str):
        cursor = self.conn.cursor()
        cursor.execute("DELETE FROM sequences WHERE name = ?", (name,))
        self.conn.commit()

    def load_config_file(self, path: Union[str, Path]) -> int:
        """
        Import settings from a JSON object or `key = value` lines.

        A JSON member named `sequences` (name -> spec) fills the sequence table.

        Args:
            path: Config file path

        Returns:
            Number of settings and sequences stored
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ParseError(f"Cannot read config file {path}: {e}") from e

        if text.lstrip().startswith("{"):
            try:
                data = json.loads(text)
            except ValueError as e:
                raise ParseError(f"Malformed config file {path}: {e}") from e
        else:
            data = {}
            for number, line in enumerate(text.splitlines(), 1):
                line = line.split('#', 1)[0].strip()
                if not line:
                    continue
                if '=' not in line:
                    raise ParseError(f"{path}:{number}: expected 'key = value'")
                key, value = line.split('=', 1)
                data[key.strip()] = value.strip()

        stored = 0
        for name, spec in (data.pop('sequences', None) or {}).items():
            self.add_sequence(name, spec)
            stored += 1
        for key, value in data.items():
            self.set_setting(key, json.dumps(value) if isinstance(value, (dict, list)) else value)
            stored += 1
        logger.info(f"Loaded {stored} entries from {path}")
        return stored

    def save_sweep_cache(self, key: str, rows: List[Dict[str, Any]]):
        """
        Save sweep rows under a parameter fingerprint.

        Args:
            key: Fingerprint of the sweep parameters
            rows: List of row dicts
        """
        try:
            cursor = self.conn.cursor()
            cursor.execute("""
                INSERT OR REPLACE INTO sweep_cache
                (fingerprint, rows_json, timestamp)
                VALUES (?, ?, ?)
            """, (key, json.dumps(rows), time.time()))
            self.conn.commit()
            logger.debug(f"Saved sweep cache {key[:12]}: {len(rows)} rows")
        except (sqlite3.Error, TypeError, ValueError) as e:
            logger.error(f"Failed to save sweep cache: {e}")

    def get_sweep_cache(self, key: str, max_age_seconds: int = 86400) -> Optional[List[Dict[str, Any]]]:
        """
        Cached sweep rows if present and younger than `max_age_seconds`.

        Returns:
            List of row dicts, or None if not found/expired
        """
        try:
            cursor = self.conn.cursor()
            cursor.execute("""
                SELECT rows_json, timestamp
                FROM sweep_cache
                WHERE fingerprint = ?
            """, (key,))
            row = cursor.fetchone()
            if row:
                rows_json, timestamp = row
                cache_age = time.time() - timestamp
                if cache_age < max_age_seconds:
                    logger.debug(f"Loaded sweep cache {key[:12]} ({int(cache_age)}s old)")
                    return json.loads(rows_json)
                logger.debug(f"Sweep cache {key[:12]} expired ({int(cache_age)}s old, max {max_age_seconds}s)")
                cursor.execute("DELETE FROM sweep_cache WHERE fingerprint = ?", (key,))
                self.conn.commit()
            return None
        except sqlite3.Error as e:
            logger.error(f"Failed to get sweep cache: {e}")
            return None

    def close(self):
        """Close the database connection."""
        if self.conn:
            self.conn.close()
            self.conn = None
