"""
Report Generator
Writes build, sweep, random and comparison results as JSON, text or HTML
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Tuple

from jinja2 import Template
from tabulate import tabulate

from utils.logger import get_logger

logger = get_logger(__name__)

FORMATS = ('json', 'text', 'html')


class ReportGenerator:
    """Render result dictionaries to files."""

    def __init__(self, config: Dict):
        """Initialize report generator."""
        self.config = config
        self.report_config = config.get('reporting', {})

    @staticmethod
    def format_for(output_path: str) -> str:
        """Guess a format from the file extension; JSON by default."""
        suffix = Path(output_path).suffix.lower()
        if suffix in ('.txt', '.text'):
            return 'text'
        if suffix in ('.html', '.htm'):
            return 'html'
        return 'json'

    def generate(self, results: Dict, output_path: str, format: str = 'json'):
        """
        Generate report.

        Args:
            results: Result dictionary (scalars, nested dicts, lists of row dicts)
            output_path: Output file path
            format: Report format (json, text, html)
        """
        if format == 'json':
            content = self.render_json(results)
        elif format == 'text':
            content = self.render_text(results)
        elif format == 'html':
            content = self.render_html(results)
        else:
            raise ValueError(f"Unsupported format: {format}")

        path = Path(output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(content, encoding='utf-8')
        logger.info(f"{format.upper()} report generated: {output_path}")

    def render_json(self, results: Dict) -> str:
        return json.dumps(results, indent=2) + "\n"

    def render_text(self, results: Dict) -> str:
        scalars, tables = self._split(results)
        lines = [f"{key}: {value}" for key, value in scalars]
        for name, rows in tables:
            lines.append("")
            lines.append(f"[{name}]")
            lines.append(tabulate([self._flatten(row) for row in rows], headers="keys", tablefmt="simple"))
        return "\n".join(lines) + "\n"

    def render_html(self, results: Dict) -> str:
        scalars, tables = self._split(results)
        rendered_tables = []
        for name, rows in tables:
            flat = [self._flatten(row) for row in rows]
            rendered_tables.append({
                'name': name,
                'html': tabulate(flat, headers="keys", tablefmt="html"),
            })
        template = Template(self._get_html_template())
        return template.render(
            title=results.get('title', 'stackwise report'),
            scalars=scalars,
            tables=rendered_tables,
        )

    def _split(self, results: Dict) -> Tuple[List[Tuple[str, Any]], List[Tuple[str, List[Dict]]]]:
        """Separate scalar entries from row tables, flattening nested dicts into dotted keys."""
        scalars: List[Tuple[str, Any]] = []
        tables: List[Tuple[str, List[Dict]]] = []

        def visit(prefix: str, value: Any):
            if isinstance(value, dict):
                for key, inner in value.items():
                    visit(f"{prefix}.{key}" if prefix else str(key), inner)
            elif isinstance(value, list) and value and all(isinstance(item, dict) for item in value):
                tables.append((prefix, value))
            elif isinstance(value, list):
                scalars.append((prefix, ", ".join(str(item) for item in value) or "-"))
            else:
                scalars.append((prefix, value))

        visit("", {key: value for key, value in results.items() if key != 'title'})
        return scalars, tables

    def _flatten(self, row: Dict, prefix: str = "") -> Dict[str, Any]:
        flat: Dict[str, Any] = {}
        for key, value in row.items():
            name = f"{prefix}.{key}" if prefix else str(key)
            if isinstance(value, dict):
                flat.update(self._flatten(value, name))
            elif isinstance(value, list):
                flat[name] = ", ".join(str(item) for item in value) or "-"
            else:
                flat[name] = value
        return flat

    def _get_html_template(self) -> str:
        """Get HTML template."""
        return """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="UTF-8">
<title>{{ title }}</title>
<style>
body { font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif; margin: 2em; color: #333; }
h1 { color: #667eea; }
table { border-collapse: collapse; margin-bottom: 1.5em; }
th, td { border: 1px solid #ddd; padding: 4px 10px; text-align: left; }
th { background: #f4f4f8; }
</style>
</head>
<body>
<h1>{{ title }}</h1>
<table>
{% for key, value in scalars %}<tr><th>{{ key }}</th><td>{{ value }}</td></tr>
{% endfor %}</table>
{% for table in tables %}<h2>{{ table.name }}</h2>
{{ table.html }}
{% endfor %}</body>
</html>
"""
