import functools
from typing import Callable, List, Optional, Sequence, Tuple

import click
import pandas as pd
from rich.console import Console
from rich.table import Table

from core.custom_logging import logger
from core.errors import BudgetExceeded, InputFormatError
from core.hypercube import Vertex, parse_vertex
from core.reports import dump_json
from core.settings import get_settings
from core.walsh_basis import CoeffVector, coeff_vector_to_json

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


def handle_errors(command: Callable) -> Callable:
    """Maps input errors to exit code 2 and exhausted budgets to exit code 3."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except BudgetExceeded as e:
            logger.warning(f"Budget exceeded: {e}")
            click.echo(f"Error: budget exceeded: {e}", err=True)
            finish(EXIT_BUDGET)
        except (ValueError, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            finish(EXIT_INPUT)

    return wrapper


def finish(code: int) -> None:
    click.get_current_context().exit(code)


def n_jobs() -> int:
    return get_settings().threads


def parse_int_list(text: str, name: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InputFormatError(f"Malformed {name} '{text}': expected comma-separated integers") from e


def parse_k_range(text: str) -> Tuple[int, int]:
    """'3..6' or '4' -> inclusive bounds."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
        else:
            low = high = int(text)
    except ValueError as e:
        raise InputFormatError(f"Malformed k range '{text}': expected 'a..b' or a single integer") from e
    if low > high:
        raise InputFormatError(f"Empty k range '{text}'")
    return low, high


def parse_points(text: str, k: int) -> List[Vertex]:
    points = [parse_vertex(part) for part in text.split(",") if part.strip()]
    for x in points:
        if x.k != k:
            raise InputFormatError(f"Vertex '{x}' has {x.k} coordinates, expected k={k}")
    return points


def witness_entries(f: Optional[CoeffVector]) -> Optional[List[dict]]:
    return None if f is None else coeff_vector_to_json(f)


def emit_json(model) -> None:
    click.echo(dump_json(model))


def emit_csv(rows: Sequence[dict], columns: Sequence[str]) -> None:
    click.echo(pd.DataFrame(list(rows), columns=list(columns)).to_csv(index=False), nl=False)


def emit_table(title: str, columns: Sequence[str], rows: Sequence[Sequence]) -> None:
    table = Table(title=title)
    for column in columns:
        table.add_column(column)
    for row in rows:
        table.add_row(*(str(v) for v in row))
    Console().print(table)
