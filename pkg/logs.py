"""
Logging setup: readable stderr output plus an optional daily JSON-lines run log
"""
import json
import logging
import os
import sys
from datetime import datetime
from typing import Optional


class JsonLinesFormatter(logging.Formatter):
    """One JSON object per record"""

    def format(self, record: logging.LogRecord) -> str:
        entry = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
        }
        fields = getattr(record, 'fields', None)
        if fields:
            entry['fields'] = fields
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class DailyJsonLinesHandler(logging.Handler):
    """Appends records to <log_dir>/charvar_<YYYYMMDD>.log, switching files at midnight"""

    def __init__(self, log_dir: str, prefix: str = 'charvar'):
        super().__init__()
        self.log_dir = log_dir
        self.prefix = prefix
        os.makedirs(self.log_dir, exist_ok=True)
        self.setFormatter(JsonLinesFormatter())

    @property
    def log_file(self) -> str:
        today = datetime.now().strftime('%Y%m%d')
        return os.path.join(self.log_dir, f'{self.prefix}_{today}.log')

    def emit(self, record: logging.LogRecord):
        try:
            line = self.format(record)
            with open(self.log_file, 'a', encoding='utf-8') as f:
                f.write(line + '\n')
        except Exception:
            self.handleError(record)


def configure_logging(verbosity: int = 0, log_dir: Optional[str] = None) -> logging.Logger:
    """Install handlers on the root logger; repeated calls replace earlier ones"""
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG

    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_charvar', False):
            root.removeHandler(handler)

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter('%(levelname)s %(name)s: %(message)s'))
    console.setLevel(level)
    console._charvar = True
    root.addHandler(console)

    if log_dir:
        run_log = DailyJsonLinesHandler(log_dir)
        run_log.setLevel(logging.DEBUG)
        run_log._charvar = True
        root.addHandler(run_log)
        root.setLevel(logging.DEBUG)
    else:
        root.setLevel(level)
    return root
